import sys

from rhythmprint.cli import main

sys.exit(main())
