import sys

from dftt.cli import main

sys.exit(main())
