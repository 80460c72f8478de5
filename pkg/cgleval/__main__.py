import sys
from cgleval.cli import main

sys.exit(main())
