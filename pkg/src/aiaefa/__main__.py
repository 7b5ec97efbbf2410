import sys

from aiaefa.cli import main

sys.exit(main())
