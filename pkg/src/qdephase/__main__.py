import sys

from qdephase.cli import main

sys.exit(main())
