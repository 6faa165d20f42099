import hashlib

import pytest

from chainmarket import errors
from chainmarket.metadata_store import MetadataStore, check_hash, content_hash, encode_metadata

# published SHA-256 test vectors
EMPTY_DIGEST = "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"
ABC_DIGEST = "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"


def test_put_is_deterministic():
    s = MetadataStore()
    assert s.put(b"art") == s.put(b"art")
    assert len(s) == 1


def test_distinct_blobs_distinct_hashes():
    s = MetadataStore()
    hs = {s.put(bytes([i])) for i in range(256)}
    assert len(hs) == 256


def test_empty_blob_digest():
    assert MetadataStore().put(b"") == EMPTY_DIGEST
    assert content_hash(b"abc") == ABC_DIGEST


def test_get_roundtrip_and_missing():
    s = MetadataStore()
    h = s.put(b"payload")
    assert s.get(h) == b"payload"
    assert s.get(h.upper()) == b"payload"
    with pytest.raises(errors.NotFound):
        s.get("0" * 64)
    with pytest.raises(errors.InvalidHash):
        s.get("xyz")


def test_buyer_validation_flow(minted):
    w, tid = minted
    rec = w.tokens.record("eth-main/art", tid)
    blob = w.store.get(rec.metadata_hash)
    assert hashlib.sha256(blob).hexdigest() == rec.metadata_hash
    assert w.store.verify(rec.metadata_hash)


def test_encoding_is_canonical():
    assert encode_metadata({"b": 1, "a": [1, 2]}) == b'{"a":[1,2],"b":1}'
    assert encode_metadata("é") == "é".encode()
    assert encode_metadata(b"\x00") == b"\x00"


@pytest.mark.parametrize("bad", ["", "g" * 64, "a" * 63, None, 5])
def test_check_hash_rejects(bad):
    with pytest.raises(errors.InvalidHash):
        check_hash(bad)
