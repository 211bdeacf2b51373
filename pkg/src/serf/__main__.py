import sys

from serf.cli import main

sys.exit(main())
