"""Regenerate the shipped model files from the programmatic constructors."""

from pathlib import Path

from anyon_interferometry.models import BUILTIN_NAMES, builtin_model, serialize

DATA = Path(__file__).resolve().parents[1] / "src" / "anyon_interferometry" / "data"

if __name__ == "__main__":
    DATA.mkdir(exist_ok=True)
    for name in BUILTIN_NAMES:
        path = DATA / f"{name}.json"
        path.write_text(serialize(builtin_model(name)), encoding="utf-8")
        print(f"wrote {path}")
