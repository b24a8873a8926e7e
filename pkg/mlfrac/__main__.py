"""Allow `python -m mlfrac`."""
import sys

from mlfrac.cli.main import main

sys.exit(main())
