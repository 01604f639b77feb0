from typing import List, Tuple


def str_cast_ratio(s: str) -> float:
    # "5%" -> 0.05; plain numbers are taken as-is
    s = s.strip()
    if s.endswith("%"):
        return float(s[:-1]) / 100
    return float(s)


def str_cast_bool(s: str) -> bool:
    v = s.strip().lower()
    if v in {"on", "true", "yes", "1"}:
        return True
    if v in {"off", "false", "no", "0"}:
        return False
    raise ValueError(f"Cannot interpret {s!r} as on/off")


def str_cast_floats(s: str) -> List[float]:
    return [float(t) for t in s.split(",") if t.strip()]


def str_cast_range(s: str) -> Tuple[float, float]:
    lo, hi = str_cast_floats(s)
    return lo, hi


def format_float(v: float) -> str:
    # shortest text that round-trips; integral values lose the trailing ".0"
    v = float(v)
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)
