import sys

from catvisc.cli import main

sys.exit(main())
