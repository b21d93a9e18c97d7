"""Keeps the entries between `# SORTING_START` and `# SORTING_END` markers sorted.

Run as a module to sort the conventions table and the parameter data base in place.
"""

import re
from pathlib import Path
from typing import List

_SECTION = re.compile(
    r"(?P<head>^[ \t]*# SORTING_START\n)(?P<body>.*?)(?P<tail>^[ \t]*# SORTING_END\n)",
    re.M | re.S,
)
SORTED_FILES = ["conventions.py", "prep/data_base.py"]


def sort_lines_in_string(s: str) -> str:
    lines = [l for l in s.split("\n") if l.strip()]
    return "".join(f"{l}\n" for l in sorted(lines, key=lambda v: v.strip().upper()))


def sort_sections(s: str) -> str:
    return _SECTION.sub(lambda m: m["head"] + sort_lines_in_string(m["body"]) + m["tail"], s)


def unsorted_files(base: Path = Path(__file__).parent) -> List[str]:
    """Names of the `SORTED_FILES` whose marked sections are out of order."""
    res = []
    for filename in SORTED_FILES:
        text = (base / filename).read_text()
        if sort_sections(text) != text:
            res.append(filename)
    return res


if __name__ == "__main__":
    this_dir = Path(__file__).parent
    for filename in SORTED_FILES:
        fp = this_dir / filename
        fp.write_text(sort_sections(fp.read_text()))
