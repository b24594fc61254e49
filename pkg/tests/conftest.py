import numpy as np
import pytest

from iocattrib.featurize import Dataset, DatasetLevel, FeatureSpace, FeatureVector, Instance
from iocattrib.fixtures import fixture_path
from iocattrib.ingest import FeatureId

# Transcription of the published high-level excerpt: 7 actors x 4 features.
TABLE3_CSV = """actor,T1189,T1083,S0020,S0234
Dark Caracal,1,1,0,1
Dark hotel,1,1,0,1
Backdoor Diplomacy,0,0,1,0
Elderwood,1,0,0,0
Ferocious Kitten,0,1,1,1
Gallmaker,1,1,0,1
Indigo Zebra,0,0,1,1
"""

# Transcription of the published low-level excerpt, first row (Deep Panda):
# 3 hashes, 3 IPs (one duplicated), 2 domains.
TABLE2_ROW1_CSV = """actor,report_id,kind,value
Deep Panda,r1,file_hash,2dce7fc3f52a692d8a84a0c182519133
Deep Panda,r1,file_hash,1856a6a28621f241698e4e4287cba7c9
Deep Panda,r1,file_hash,de7500fc1065a081180841f32f06a537
Deep Panda,r1,ip,1.9.5.38
Deep Panda,r1,ip,202.86.190.3
Deep Panda,r1,ip,202.86.190.3
Deep Panda,r1,domain,sharepoint-vacit.com
Deep Panda,r1,domain,gifas.asso.net
"""

# The published 16-actor count table: (actor, hashes, ips, domains).
TABLE4_COUNTS = [
    ("Naikon", 22, 0, 52),
    ("Deep Panda", 31, 3, 2),
    ("Dust Storm", 54, 0, 61),
    ("Suckfly", 18, 1, 7),
    ("Carbanak", 37, 81, 35),
    ("Sandworm", 73, 13, 0),
    ("Lazarus", 76, 0, 4),
    ("Cleaver", 41, 11, 15),
    ("Monsoon", 40, 5, 39),
    ("Dark hotel", 13, 0, 32),
    ("Poseidon", 12, 0, 5),
    ("APT30", 12, 0, 8),
    ("Stealth Falcon", 9, 1, 14),
    ("GCMAN", 8, 6, 13),
    ("Fancy Bear", 61, 26, 78),
    ("FIN6", 5, 0, 0),
]


@pytest.fixture
def table3_path(tmp_path):
    path = tmp_path / "table3.csv"
    path.write_text(TABLE3_CSV, encoding="utf-8")
    return path


@pytest.fixture
def table2_row1_path(tmp_path):
    path = tmp_path / "table2_row1.csv"
    path.write_text(TABLE2_ROW1_CSV, encoding="utf-8")
    return path


@pytest.fixture(scope="session")
def highlevel_fixture():
    return fixture_path("highlevel_matrix.csv")


@pytest.fixture(scope="session")
def lowlevel_fixture():
    return fixture_path("lowlevel_iocs.csv")


def make_dataset(rows: dict[str, list[list[int]]], level=DatasetLevel.HIGH) -> Dataset:
    """Tiny dataset helper: label -> list of binary vectors."""
    n = len(next(iter(rows.values()))[0])
    space = FeatureSpace(tuple(FeatureId.parse(f"T{1001 + i}") for i in range(n)))
    instances = [
        Instance(label, FeatureVector(np.array(bits, dtype=np.uint8)))
        for label, vectors in rows.items()
        for bits in vectors
    ]
    return Dataset(space, tuple(instances), level)
