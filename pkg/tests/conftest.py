import sys
from pathlib import Path

# make tests/oracle.py importable without packaging the tests
sys.path.insert(0, str(Path(__file__).parent))
