import sys

from hlpnet.cli import main

sys.exit(main())
