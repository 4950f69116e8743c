"""Serialization tests: deterministic envelopes, strict parsing."""

import base64
import json
import random

import pytest

from scpabe import abe, storage
from scpabe.errors import FormatError
from scpabe.lattice import layer_coords
from scpabe.tree import tree_to_dict

PROVIDERS = ["transparent", "production"]


def _material(group, fixture_2x3, seed=7):
    rng = random.Random(seed)
    pk, mk = abe.setup(group, rng)
    uk = abe.keygen(pk, mk, (2, 3), fixture_2x3.policies[(2, 2)], rng)
    msgs = {c: group.random_g1(rng) for c in layer_coords((2, 3))}
    ct = abe.encrypt(pk, fixture_2x3, msgs, rng)
    return pk, mk, uk, ct, msgs


@pytest.fixture(params=PROVIDERS)
def material(request, fixture_2x3):
    group = request.getfixturevalue(request.param)
    return (group, *_material(group, fixture_2x3))


class TestRoundtrips:
    def test_public_key(self, material):
        group, pk, *_ = material
        loaded = storage.load_public_key(storage.dump_public_key(pk))
        assert loaded == pk
        assert loaded.group.descriptor == group.descriptor

    def test_master_key(self, material):
        _, _, mk, *_ = material
        loaded = storage.load_master_key(storage.dump_master_key(mk))
        assert loaded == mk

    def test_user_key(self, material):
        _, _, _, uk, *_ = material
        loaded = storage.load_user_key(storage.dump_user_key(uk))
        assert loaded == uk

    def test_ciphertext(self, material):
        _, _, _, _, ct, _ = material
        loaded = storage.load_ciphertext(storage.dump_ciphertext(ct))
        assert tree_to_dict(loaded.tree) == tree_to_dict(ct.tree)
        assert loaded.leaf_comps == ct.leaf_comps
        assert loaded.layer_comps == ct.layer_comps

    def test_loaded_material_still_decrypts(self, material):
        group, pk, mk, uk, ct, msgs = material
        pk2 = storage.load_public_key(storage.dump_public_key(pk))
        uk2 = storage.load_user_key(storage.dump_user_key(uk))
        ct2 = storage.load_ciphertext(storage.dump_ciphertext(ct))
        out = abe.decrypt(pk2, uk2, ct2)
        assert out and all(msgs[c] == m for c, m in out.items())


class TestDeterminism:
    def test_dump_is_byte_stable(self, material):
        _, pk, mk, uk, ct, _ = material
        for dump, obj in [
            (storage.dump_public_key, pk),
            (storage.dump_master_key, mk),
            (storage.dump_user_key, uk),
            (storage.dump_ciphertext, ct),
        ]:
            assert dump(obj) == dump(obj)

    def test_dump_load_dump_identity(self, material):
        _, pk, mk, uk, ct, _ = material
        assert storage.dump_public_key(
            storage.load_public_key(storage.dump_public_key(pk))
        ) == storage.dump_public_key(pk)
        assert storage.dump_user_key(
            storage.load_user_key(storage.dump_user_key(uk))
        ) == storage.dump_user_key(uk)
        assert storage.dump_ciphertext(
            storage.load_ciphertext(storage.dump_ciphertext(ct))
        ) == storage.dump_ciphertext(ct)

    def test_envelope_shape(self, material):
        _, pk, *_ = material
        doc = json.loads(storage.dump_public_key(pk))
        assert doc["format"] == "scpabe/public-key"
        assert doc["version"] == 1
        assert set(doc) == {"format", "version", "group", "body"}
        text = storage.dump_public_key(pk)
        assert text.endswith("\n")
        # Canonical form: sorted keys survive a strict re-serialization.
        assert json.dumps(doc, sort_keys=True, indent=2) + "\n" == text


class TestRejection:
    def test_not_json(self):
        with pytest.raises(FormatError):
            storage.load_public_key("not json {")

    def test_json_but_not_object(self):
        with pytest.raises(FormatError):
            storage.load_public_key("[1, 2]")

    def test_wrong_role(self, material):
        _, pk, mk, *_ = material
        text = storage.dump_master_key(mk)
        with pytest.raises(FormatError):
            storage.load_public_key(text)

    def test_unknown_version(self, material):
        _, pk, *_ = material
        doc = json.loads(storage.dump_public_key(pk))
        doc["version"] = 2
        with pytest.raises(FormatError):
            storage.load_public_key(json.dumps(doc))

    def test_missing_field(self, material):
        _, pk, *_ = material
        doc = json.loads(storage.dump_public_key(pk))
        del doc["body"]["h"]
        with pytest.raises(FormatError):
            storage.load_public_key(json.dumps(doc))

    def test_group_descriptor_drift(self, material):
        _, pk, *_ = material
        doc = json.loads(storage.dump_public_key(pk))
        doc["group"]["order"] = str(int(doc["group"]["order"]) + 2)
        with pytest.raises(FormatError):
            storage.load_public_key(json.dumps(doc))

    def test_bad_base64(self, material):
        _, pk, *_ = material
        doc = json.loads(storage.dump_public_key(pk))
        doc["body"]["g"] = "!!!not-base64!!!"
        with pytest.raises(FormatError):
            storage.load_public_key(json.dumps(doc))

    def test_truncated_element(self, material):
        _, pk, *_ = material
        doc = json.loads(storage.dump_public_key(pk))
        raw = base64.b64decode(doc["body"]["g"])
        doc["body"]["g"] = base64.b64encode(raw[:-1]).decode()
        with pytest.raises(FormatError):
            storage.load_public_key(json.dumps(doc))

    def test_ciphertext_missing_leaf_component(self, material):
        _, _, _, _, ct, _ = material
        doc = json.loads(storage.dump_ciphertext(ct))
        some = next(iter(doc["body"]["leaves"]))
        del doc["body"]["leaves"][some]
        with pytest.raises(FormatError):
            storage.load_ciphertext(json.dumps(doc))

    def test_ciphertext_extra_layer(self, material):
        _, _, _, _, ct, _ = material
        doc = json.loads(storage.dump_ciphertext(ct))
        sample = next(iter(doc["body"]["layers"].values()))
        doc["body"]["layers"]["9,9"] = sample
        with pytest.raises(FormatError):
            storage.load_ciphertext(json.dumps(doc))

    def test_ciphertext_malformed_tree(self, material):
        _, _, _, _, ct, _ = material
        doc = json.loads(storage.dump_ciphertext(ct))
        doc["body"]["tree"] = {"nonsense": True}
        with pytest.raises(FormatError):
            storage.load_ciphertext(json.dumps(doc))

    def test_user_key_dims_mismatch(self, material):
        _, _, _, uk, _, _ = material
        doc = json.loads(storage.dump_user_key(uk))
        doc["body"]["dims"] = [0]
        with pytest.raises(FormatError):
            storage.load_user_key(json.dumps(doc))


class TestCrossProvider:
    def test_material_reloads_under_its_own_provider(
        self, transparent, production, fixture_2x3
    ):
        # The envelope pins the group; each file reconstructs its own provider.
        for group in (transparent, production):
            pk, *_ = _material(group, fixture_2x3)
            loaded = storage.load_public_key(storage.dump_public_key(pk))
            assert loaded.group.descriptor == group.descriptor

    def test_transparent_and_production_dumps_differ(
        self, transparent, production, fixture_2x3
    ):
        pk_t, *_ = _material(transparent, fixture_2x3)
        pk_p, *_ = _material(production, fixture_2x3)
        a = json.loads(storage.dump_public_key(pk_t))["group"]
        b = json.loads(storage.dump_public_key(pk_p))["group"]
        assert a != b
