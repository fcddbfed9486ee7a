import math
from typing import List

# Significant digits for every number written to a CSV report.
SIGNIFICANT_DIGITS = 10

# Slack used when counting grid points, so that 0.1:0.5:0.2 includes 0.5.
GRID_EPSILON = 1e-9


def format_float(value: float, digits: int = SIGNIFICANT_DIGITS) -> str:
    """
    Format a float with a fixed number of significant digits.

    The alternate form keeps trailing zeros (0.4 -> '0.4000000000') and
    str.format is not locale dependent, so the decimal separator is always '.'.
    """
    return format(float(value), f"#.{digits}g")


def round_float(value: float, digits: int = SIGNIFICANT_DIGITS) -> float:
    """
    Round a float to a number of significant digits for stable JSON output.
    """
    return float(format(float(value), f".{digits}g"))


def complex_pair(value: complex) -> List[float]:
    """
    Encode a complex number as a JSON-friendly [re, im] pair.
    """
    value = complex(value)
    return [round_float(value.real), round_float(value.imag)]


def parse_grid(text: str) -> List[float]:
    """
    Parse a grid specification into an inclusive list of values.

    Accepted forms are a single value ('0.2') or 'start:stop:step'
    ('0.1:0.5:0.2' -> [0.1, 0.3, 0.5]).
    """
    parts = text.split(":")
    try:
        numbers = [float(part) for part in parts]
    except ValueError:
        raise ValueError(f"Cannot parse grid '{text}': expected start:stop:step or a number.")

    if len(numbers) == 1:
        return numbers
    if len(numbers) != 3:
        raise ValueError(f"Cannot parse grid '{text}': expected start:stop:step or a number.")

    start, stop, step = numbers
    if not all(math.isfinite(number) for number in numbers):
        raise ValueError(f"Grid '{text}' must contain finite numbers.")
    if step <= 0:
        raise ValueError(f"Grid '{text}' must have a positive step.")
    if start > stop:
        raise ValueError(f"Grid '{text}' is empty: start is greater than stop.")

    count = int(math.floor((stop - start) / step + GRID_EPSILON)) + 1
    # Rounding removes the accumulated error of start + i * step.
    return [round(start + i * step, 12) for i in range(count)]

