import sys

from antsel.cli import main

sys.exit(main())
