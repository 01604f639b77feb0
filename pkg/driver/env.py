# pointers to project locations
# should not depend on other source code files
from pathlib import Path

PROJ_PATH = Path(__file__).parent.parent.absolute()
RESULTS_PATH = PROJ_PATH / "results"
