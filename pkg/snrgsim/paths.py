from pathlib import Path

from appdirs import user_data_dir


def _get_results_directory() -> Path:
    """Returns the path to the default results directory and creates it, if not yet existing."""
    fp = Path(user_data_dir(appname="snrgsim", appauthor="snrgsim")) / "results"
    fp.mkdir(parents=True, exist_ok=True)
    return fp


BASE_DIR = Path(__file__).resolve().parent
DATA_DIR = BASE_DIR / "data"
CONFIG_DIR = DATA_DIR / "configs"
RESULTS_DIR = _get_results_directory()
