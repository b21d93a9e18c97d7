from dataclasses import dataclass


@dataclass(frozen=True)
class ParDat:
    name: str
    data: float
    doc: str = ""
    src: str = ""
    unit: str = ""
