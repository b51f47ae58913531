from .experiments.cli import main
import sys

sys.exit(main())
