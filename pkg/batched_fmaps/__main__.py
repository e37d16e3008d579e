import sys

from batched_fmaps.cli import main

sys.exit(main())
