#!/usr/bin/env python3
# Walk through the text analysis chain: tokenize -> lowercase -> stem ->
# stopword filter. Each step is configurable; resources load once at
# construction.

from pathlib import Path
import tempfile

from passagerank import Analyzer, AnalyzerConfig
from passagerank.text import DICTIONARY, default_stopwords_path

sentence = "Czy w państwach starożytnych powoływani byli posłowie i poselstwa?"

# Bare defaults: lowercase + Unicode word tokenization, nothing removed.
plain = Analyzer()
print("plain tokens: ", plain.analyze(sentence))

# Add the bundled Polish stopword list.
with_stops = Analyzer(AnalyzerConfig(stopword_path=default_stopwords_path()))
print("minus stopwords:", with_stops.analyze(sentence))

# A dictionary stemmer maps surface forms to base forms via a TSV table.
table = {
    "państwach": "państwo",
    "starożytnych": "starożytny",
    "powoływani": "powoływać",
    "posłowie": "poseł",
    "poselstwa": "poselstwo",
}
with tempfile.TemporaryDirectory() as tmp:
    table_path = Path(tmp) / "stems.tsv"
    table_path.write_text("".join(f"{k}\t{v}\n" for k, v in table.items()), encoding="utf-8")
    full = Analyzer(
        AnalyzerConfig(
            stemmer=DICTIONARY,
            stem_table_path=table_path,
            stopword_path=default_stopwords_path(),
        )
    )
    print("full chain:   ", full.analyze(sentence))
