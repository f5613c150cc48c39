import sys

from dipl0.cli import main

sys.exit(main())
