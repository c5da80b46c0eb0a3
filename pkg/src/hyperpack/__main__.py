import sys

from hyperpack.cli import main

sys.exit(main())
