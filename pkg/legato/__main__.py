import sys

from legato.main import run

sys.exit(run())
