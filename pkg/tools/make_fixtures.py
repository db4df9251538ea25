"""Regenerate the fixture corpus: python3 tools/make_fixtures.py [ROOT]"""

import sys
from pathlib import Path

from ainfqi.corpus import corpus_files

root = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "fixtures")
for rel, text in corpus_files().items():
    p = root / rel
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text, encoding="utf-8")
    print(p)
