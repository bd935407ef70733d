import sys

from sgdkf.cli import main

sys.exit(main())
