import sys

from pdsync.cli import main

sys.exit(main())
