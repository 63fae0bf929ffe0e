import sys

from recdel.cli import main

sys.exit(main())
