from vivada.constants import WHITESPACE_RE


def squash(s: str) -> str:
    return WHITESPACE_RE.sub(" ", s).strip()


def slugify_heading(heading: str) -> str:
    """"See also" -> "see-also", "External links" -> "external-links"."""
    return "-".join(squash(heading).lower().replace("_", " ").split(" "))


def percent(part: int, whole: int) -> str:
    if whole == 0:
        return "0%"
    return f"{round(100 * part / whole)}%"
