import sys

from gossipsim.cli import main

sys.exit(main())
