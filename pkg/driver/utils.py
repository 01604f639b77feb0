import json
import logging
import os
import shutil
from pathlib import Path
from typing import Dict


def prepare_data_dir(data_dir: str | Path, cleanup=False):
    if cleanup and os.path.exists(data_dir):
        # should only be set by the most top-level command for each run
        logging.info(f"Clean up previous results in {data_dir}")
        shutil.rmtree(data_dir)
    os.makedirs(data_dir, exist_ok=True)
    assert os.path.exists(data_dir)


def dump_json(obj: Dict, path: str | Path):
    with open(path, "w") as f:
        json.dump(obj, f, indent=2, default=str)
