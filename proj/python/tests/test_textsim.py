import linkforge as lf


def test_normalize_title():
    assert lf.normalize_title("") == ""
    assert lf.normalize_title("Á-Test") == "a test"
    assert lf.normalize_title("Can't Stop") == "can stop"
    norm = lf.normalize_title("Scalable  GRAPH   Mining!!")
    assert norm == "scalable graph mining"
    assert lf.normalize_title(norm) == norm


def test_normalize_author():
    assert lf.normalize_author("Jane C. Huck") == ("jane", "c", "huck")
    assert lf.normalize_author("J. Huck") == ("j", None, "huck")
    assert lf.normalize_author("Prof. Ana María García II") == ("ana", "maria", "garcia")


def test_simhash_and_distances():
    h = lf.simhash_hex("sparse matrix factorization")
    assert len(h) == 16
    assert h == lf.simhash_hex("sparse matrix factorization")
    assert lf.simhash_hex("") == "0" * 16
    assert lf.levenshtein("kitten", "sitting") == 3
    assert lf.normalized_levenshtein("abcd", "abcd") == 0.0
    assert lf.jaccard({"a", "b", "c"}, {"b", "c", "d"}) == 0.5


def test_fullname_code():
    assert lf.fullname_code("Jane C. Huck", "J. Huck") == 5
