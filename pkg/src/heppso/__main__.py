import sys

from heppso.cli import main

sys.exit(main())
