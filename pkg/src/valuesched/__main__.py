import sys

from valuesched.cli import main

sys.exit(main())
