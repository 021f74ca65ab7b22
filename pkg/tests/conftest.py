import glob
import os

import pytest

from heurasp import corpus_path

CORPUS_DIR = str(corpus_path(""))


def corpus_files():
    main = sorted(glob.glob(os.path.join(CORPUS_DIR, "*.lp")))
    small = sorted(glob.glob(os.path.join(CORPUS_DIR, "small", "*.lp")))
    return main + small


def small_corpus_files():
    """The oracle-sized corpus: every small/ program plus the worked
    examples whose Herbrand base stays within the oracle cap."""
    files = sorted(glob.glob(os.path.join(CORPUS_DIR, "small", "*.lp")))
    for name in ("example1.lp", "example3.lp", "example5.lp",
                 "ex_two_stable.lp"):
        files.append(os.path.join(CORPUS_DIR, name))
    return files


@pytest.fixture(scope="session")
def corpus_sources():
    return {path: open(path, encoding="utf-8").read()
            for path in corpus_files()}
