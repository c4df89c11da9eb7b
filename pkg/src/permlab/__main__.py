import sys

from permlab.lab.cli import main

sys.exit(main())
