import sys

from qec.cli import main

sys.exit(main())
