import hashlib

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ctfidf.preprocess import (
    PreprocessConfig,
    load_stopwords,
    preprocess_doc,
    preprocess_corpus,
    remove_stopwords,
    stopword_list_hash,
    tokenize,
)


class TestTokenize:
    def test_punctuation_and_lowercase(self):
        assert tokenize("Win a FREE prize!!") == ["win", "a", "free", "prize"]

    def test_empty(self):
        assert tokenize("") == []

    def test_digit_runs_preserved(self):
        assert tokenize("call 08001234567 now") == ["call", "08001234567", "now"]

    def test_apostrophes_split(self):
        assert tokenize("don't") == ["don", "t"]

    @given(st.text(max_size=200))
    def test_never_empty_or_uppercase(self, text):
        for tok in tokenize(text):
            assert tok
            assert tok == tok.lower()

    @given(st.text(max_size=200))
    def test_tokens_are_letters_or_digits(self, text):
        for tok in tokenize(text):
            assert all(c.isalnum() for c in tok)


class TestStopwords:
    def test_shipped_list_size_and_membership(self):
        sw = load_stopwords()
        assert len(sw) == 174
        for w in ["the", "is", "a", "yours", "very", "i"]:
            assert w in sw

    def test_filter_example(self):
        sw = load_stopwords()
        assert remove_stopwords(["the", "prize", "is", "yours"], sw) == ["prize"]

    def test_empty_and_identity(self):
        sw = load_stopwords()
        assert remove_stopwords([], sw) == []
        toks = ["prize", "winner", "cash"]
        assert remove_stopwords(toks, sw) == toks

    def test_hash_matches_shipped_file(self):
        cfg = PreprocessConfig()
        cfg.validate()
        assert cfg.stopword_hash == stopword_list_hash()
        assert len(cfg.stopword_hash) == 64

    def test_tampered_hash_rejected(self):
        cfg = PreprocessConfig(stopword_hash="0" * 64)
        with pytest.raises(ValueError, match="hash mismatch"):
            cfg.validate()


class TestPreprocessDoc:
    def test_spec_composition(self):
        doc = preprocess_doc("You have WON a guaranteed prize",
                             PreprocessConfig())
        assert list(doc.stems) == ["won", "guarante", "prize"]

    def test_all_stopwords_becomes_empty(self):
        doc = preprocess_doc("you are the... the the", PreprocessConfig())
        assert doc.stems == ()

    def test_single_stem_fixed_point(self):
        doc = preprocess_doc("prize", PreprocessConfig())
        assert list(doc.stems) == ["prize"]

    def test_remove_numbers_flag(self):
        keep = preprocess_doc("call 0800 now", PreprocessConfig())
        drop = preprocess_doc("call 0800 now",
                              PreprocessConfig(remove_numbers=True))
        assert "0800" in keep.stems
        assert "0800" not in drop.stems

    def test_min_token_length(self):
        cfg = PreprocessConfig(min_token_length=4)
        doc = preprocess_doc("win big prizes now", cfg)
        assert "win" not in doc.stems
        assert "big" not in doc.stems

    def test_no_stem_is_a_stopword(self):
        """Stopword removal precedes stemming, observably."""
        sw = load_stopwords()
        texts = ["this is a guaranteed winning entry",
                 "you would have been doing it",
                 "once again the movie was very good"]
        for doc in preprocess_corpus(texts):
            for stem in doc.stems:
                assert stem not in sw

    def test_empty_docs_kept_in_corpus(self):
        docs = preprocess_corpus(["the", "prize winner", ""])
        assert len(docs) == 3
        assert docs[0].stems == ()
        assert docs[2].stems == ()
        assert [d.original_index for d in docs] == [0, 1, 2]
