import sys

from atomless.frontend.cli import main

sys.exit(main())
