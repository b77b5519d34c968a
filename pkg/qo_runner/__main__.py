import sys

from qo_runner.cli import main

sys.exit(main())
