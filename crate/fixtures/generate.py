#!/usr/bin/env python3
"""Builds the fixture corpus and its oracle outputs.

Every digest, archive listing, joined record and statistic written here is
computed with the Python standard library, independently of the Rust code.
Run from any directory; output lands next to this script.
"""

import base64
import copy
import csv
import hashlib
import io
import json
import re
import statistics
import tarfile
import zipfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent
DATA = ROOT / "data"
GOLDEN = ROOT / "golden"
CONFORMS = "http://mlcommons.org/croissant/1.0"
CONTEXT = {
    "@language": "en",
    "@vocab": "https://schema.org/",
    "sc": "https://schema.org/",
    "cr": "http://mlcommons.org/croissant/",
    "rai": "http://mlcommons.org/croissant/RAI/",
    "dct": "http://purl.org/dc/terms/",
}


def write(path, data):
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(data, str):
        data = data.encode()
    path.write_bytes(data)


def write_json(path, doc):
    write(path, json.dumps(doc, indent=2) + "\n")


def write_jsonl(path, records):
    write(path, "".join(json.dumps(r, separators=(",", ":"), ensure_ascii=False) + "\n" for r in records))


def sha256(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def fake_jpeg(name):
    return b"\xff\xd8\xff\xe0" + (name.encode() * 8) + b"\xff\xd9"


def make_tar(path, members):
    buf = io.BytesIO()
    with tarfile.open(fileobj=buf, mode="w", format=tarfile.USTAR_FORMAT) as tar:
        for name, data in members:
            info = tarfile.TarInfo(name)
            info.size = len(data)
            info.mtime = 0
            info.mode = 0o644
            tar.addfile(info, io.BytesIO(data))
    write(path, buf.getvalue())


def make_zip(path, members):
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_DEFLATED) as z:
        for name, data in members:
            info = zipfile.ZipInfo(name, date_time=(1980, 1, 1, 0, 0, 0))
            info.compress_type = zipfile.ZIP_DEFLATED
            z.writestr(info, data)
    write(path, buf.getvalue())


def write_csv(path, header, rows):
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    write(path, out.getvalue())


def flip_first_digit(digest):
    return ("1" if digest[0] == "0" else "0") + digest[1:]


# PASS (figures 2 and 3), with remote URLs replaced by local files.

PASS_IMAGES = ["cc", "aa", "bb"]
PASS_ROWS = [("aa", "48.85", "2.35"), ("bb", "-33.87", "151.21"), ("cc", "40.71", "-74.01")]


def pass_document(metadata_url, metadata_sha, tar_url, tar_sha, name="PASS", record_set="images"):
    rs = record_set
    return {
        "@type": "sc:Dataset",
        "name": name,
        "dct:conformsTo": CONFORMS,
        "description": "PASS is a large-scale image dataset...",
        "citeAs": "@Article{asano21pass, ...",
        "license": "cc-by-4.0",
        "url": "https://www.robots.ox.ac.uk/~vgg/data/pass/",
        "distribution": [
            {
                "@id": "metadata",
                "@type": "cr:FileObject",
                "contentUrl": metadata_url,
                "sha256": metadata_sha,
                "encodingFormat": "text/csv",
            },
            {
                "@id": "pass0",
                "@type": "cr:FileObject",
                "contentUrl": tar_url,
                "sha256": tar_sha,
                "encodingFormat": "application/x-tar",
            },
            {
                "@id": "image-files",
                "@type": "cr:FileSet",
                "containedIn": {"@id": "pass0"},
                "includes": "*.jpg",
                "encodingFormat": "image/jpeg",
            },
        ],
        "recordSet": [
            {
                "@id": rs,
                "@type": "cr:RecordSet",
                "key": f"{rs}/hash",
                "field": [
                    {
                        "@id": f"{rs}/image_content",
                        "@type": "cr:Field",
                        "dataType": "sc:ImageObject",
                        "source": {
                            "fileSet": {"@id": "image-files"},
                            "extract": {"fileProperty": "content"},
                        },
                    },
                    {
                        "@id": f"{rs}/hash",
                        "@type": "cr:Field",
                        "dataType": "sc:Text",
                        "source": {
                            "fileSet": {"@id": "image-files"},
                            "extract": {"fileProperty": "filename"},
                            "transform": {"regex": "([^\\/]*)\\.jpg"},
                        },
                        "references": {"fileObject": {"@id": "metadata"}, "column": "hash"},
                    },
                    {
                        "@id": f"{rs}/coordinates",
                        "@type": "cr:Field",
                        "dataType": "sc:GeoCoordinates",
                        "subField": [
                            {
                                "@id": f"{rs}/coordinates/latitude",
                                "@type": "cr:Field",
                                "source": {"fileObject": {"@id": "metadata"}, "column": "latitude"},
                            },
                            {
                                "@id": f"{rs}/coordinates/longitude",
                                "@type": "cr:Field",
                                "source": {"fileObject": {"@id": "metadata"}, "column": "longitude"},
                            },
                        ],
                    },
                ],
            }
        ],
    }


def join_oracle(images, csv_path, rs="images"):
    """Nested-loop join over raw files: images in fullpath order, rows in file order."""
    with open(csv_path, newline="") as f:
        rows = list(csv.DictReader(f))
    out = []
    for fullpath, data in sorted(images):
        filename = fullpath.rsplit("/", 1)[-1]
        m = re.search(r"([^\/]*)\.jpg", filename)
        if m is None:
            continue
        for row in rows:
            if row["hash"] == m.group(1):
                out.append({
                    f"{rs}/image_content": {"$bytes": base64.b64encode(data).decode()},
                    f"{rs}/hash": m.group(1),
                    f"{rs}/coordinates": {"latitude": float(row["latitude"]), "longitude": float(row["longitude"])},
                })
    return out


def build_pass():
    d = DATA / "pass"
    images = [(f"{h}.jpg", fake_jpeg(h)) for h in PASS_IMAGES]
    make_tar(d / "pass0.tar", images)
    write_csv(d / "metadata.csv", ["hash", "latitude", "longitude"], PASS_ROWS)
    doc = pass_document("data/pass/metadata.csv", sha256(d / "metadata.csv"), "data/pass/pass0.tar", sha256(d / "pass0.tar"))
    write_json(ROOT / "pass.json", doc)
    write_jsonl(GOLDEN / "pass.records.jsonl", join_oracle(images, d / "metadata.csv"))
    return doc


# mini-PASS: 5 jpgs in a tar plus a 5-row CSV, in shuffled orders.

MINI_TAR_ORDER = ["ee", "cc", "aa", "dd", "bb"]
MINI_ROWS = [
    ("cc", "40.71", "-74.01"),
    ("aa", "48.85", "2.35"),
    ("ee", "51.51", "-0.13"),
    ("bb", "-33.87", "151.21"),
    ("dd", "35.68", "139.69"),
]


def build_minipass():
    d = DATA / "minipass"
    images = [(f"{h}.jpg", fake_jpeg(h)) for h in MINI_TAR_ORDER]
    make_tar(d / "images.tar", images)
    write_csv(d / "metadata.csv", ["hash", "latitude", "longitude"], MINI_ROWS)
    write_csv(d / "metadata-drop.csv", ["hash", "latitude", "longitude"], [r for r in MINI_ROWS if r[0] != "bb"])
    write_csv(d / "metadata-dd.csv", ["hash", "latitude", "longitude"], [("zz", "1.5", "2.5")])
    tar_sha = sha256(d / "images.tar")

    def doc_for(csv_name, sha, name):
        doc = pass_document(f"data/minipass/{csv_name}", sha, "data/minipass/images.tar", tar_sha, name=name)
        doc["datePublished"] = "2021-09-16"
        return doc

    full = doc_for("metadata.csv", sha256(d / "metadata.csv"), "mini-PASS")
    write_json(ROOT / "minipass.json", full)
    write_json(ROOT / "minipass-drop.json", doc_for("metadata-drop.csv", sha256(d / "metadata-drop.csv"), "mini-PASS without bb"))
    write_json(ROOT / "minipass-nomatch.json", doc_for("metadata-dd.csv", sha256(d / "metadata-dd.csv"), "mini-PASS without matches"))
    bad = copy.deepcopy(full)
    bad["name"] = "mini-PASS with a corrupted digest"
    bad["distribution"][0]["sha256"] = flip_first_digit(bad["distribution"][0]["sha256"])
    write_json(ROOT / "minipass-badsha.json", bad)

    records = join_oracle(images, d / "metadata.csv")
    write_jsonl(GOLDEN / "minipass.records.jsonl", records)
    write_jsonl(GOLDEN / "minipass.limit2.jsonl", records[:2])
    write_jsonl(GOLDEN / "minipass-drop.records.jsonl", join_oracle(images, d / "metadata-drop.csv"))
    write_jsonl(GOLDEN / "minipass-nomatch.records.jsonl", join_oracle(images, d / "metadata-dd.csv"))


# COCO-style extraction over a 10-annotation file.

def coco_annotations():
    anns = []
    for i in range(10):
        anns.append({
            "id": 1000 + i,
            "image_id": [391895, 522418, 184613, 318219, 554625, 397133, 37777, 252219, 87038, 174482][i],
            "category_id": 1 + i % 3,
            "bbox": [12.5 * i, 3.25 + i, 40.0 + 2 * i, 30.5 + 0.25 * i],
        })
    return {"info": {"description": "COCO-style fixture"}, "images": [], "annotations": anns}


def build_coco():
    d = DATA / "coco"
    annotations = coco_annotations()
    make_zip(d / "annotations_trainval2014.zip", [
        ("annotations/captions_val2014.json", json.dumps({"annotations": []}).encode()),
        ("annotations/instances_val2014.json", json.dumps(annotations).encode()),
    ])
    rs = "images_with_bounding_box"
    doc = {
        "@context": CONTEXT,
        "@type": "sc:Dataset",
        "name": "COCO2014",
        "description": "A subset of COCO 2014 with bounding box annotations.",
        "conformsTo": CONFORMS,
        "url": "https://cocodataset.org",
        "license": "cc-by-4.0",
        "citeAs": "@inproceedings{lin2014microsoft, ...}",
        "datePublished": "2014-05-01",
        "distribution": [
            {
                "@id": "annotations_trainval2014.zip",
                "@type": "cr:FileObject",
                "name": "annotations_trainval2014.zip",
                "description": "",
                "contentUrl": "data/coco/annotations_trainval2014.zip",
                "encodingFormat": "application/zip",
                "sha256": sha256(d / "annotations_trainval2014.zip"),
            },
            {
                "@id": "annotations",
                "@type": "cr:FileObject",
                "name": "annotations",
                "description": "",
                "containedIn": {"@id": "annotations_trainval2014.zip"},
                "contentUrl": "annotations/instances_val2014.json",
                "encodingFormat": "application/json",
            },
        ],
        "recordSet": [
            {
                "@id": rs,
                "@type": "cr:RecordSet",
                "name": rs,
                "field": [
                    {
                        "@id": f"{rs}/image_id",
                        "@type": "cr:Field",
                        "name": "image_id",
                        "description": "",
                        "dataType": "sc:Integer",
                        "source": {
                            "fileObject": {"@id": "annotations"},
                            "extract": {"jsonPath": "$.annotations[*].image_id"},
                        },
                    },
                    {
                        "@id": f"{rs}/bbox",
                        "@type": "cr:Field",
                        "name": "bbox",
                        "description": "",
                        "dataType": "cr:BoundingBox",
                        "source": {
                            "fileObject": {"@id": "annotations"},
                            "extract": {"jsonPath": "$.annotations[*].bbox"},
                        },
                    },
                ],
            }
        ],
    }
    write_json(ROOT / "coco.json", doc)
    with zipfile.ZipFile(d / "annotations_trainval2014.zip") as z:
        parsed = json.loads(z.read("annotations/instances_val2014.json"))
    records = [
        {f"{rs}/image_id": a["image_id"], f"{rs}/bbox": [float(v) for v in a["bbox"]]}
        for a in parsed["annotations"]
    ]
    write_jsonl(GOLDEN / "coco.records.jsonl", records)
    return doc


# 10-record table with a split column.

SPLITS = ["train", "train", "test", "train", "train", "validation", "train", "test", "train", "train"]


def build_split10():
    d = DATA / "split10"
    rows = [(i, SPLITS[i], f"{i * 1.5}") for i in range(10)]
    write_csv(d / "split10.csv", ["id", "split", "value"], rows)
    rs = "examples"
    doc = {
        "@context": CONTEXT,
        "@type": "sc:Dataset",
        "name": "split10",
        "description": "Ten rows with a split column.",
        "conformsTo": CONFORMS,
        "license": "cc0-1.0",
        "url": "https://example.org/split10",
        "citeAs": "split10",
        "datePublished": "2024-01-01",
        "distribution": [{
            "@id": "split10.csv",
            "@type": "cr:FileObject",
            "contentUrl": "data/split10/split10.csv",
            "encodingFormat": "text/csv",
            "sha256": sha256(d / "split10.csv"),
        }],
        "recordSet": [{
            "@id": rs,
            "@type": "cr:RecordSet",
            "key": f"{rs}/id",
            "field": [
                {"@id": f"{rs}/id", "@type": "cr:Field", "dataType": "sc:Integer",
                 "source": {"fileObject": {"@id": "split10.csv"}, "extract": {"column": "id"}}},
                {"@id": f"{rs}/split", "@type": "cr:Field", "dataType": "cr:Split",
                 "source": {"fileObject": {"@id": "split10.csv"}, "extract": {"column": "split"}}},
                {"@id": f"{rs}/value", "@type": "cr:Field", "dataType": "sc:Float",
                 "source": {"fileObject": {"@id": "split10.csv"}, "extract": {"column": "value"}}},
            ],
        }],
    }
    write_json(ROOT / "split10.json", doc)
    with open(d / "split10.csv", newline="") as f:
        records = [
            {f"{rs}/id": int(r["id"]), f"{rs}/split": r["split"], f"{rs}/value": float(r["value"])}
            for r in csv.DictReader(f)
        ]
    write_jsonl(GOLDEN / "split10.records.jsonl", records)


# Archive fixtures for resource resolution.

def build_archives():
    d = DATA / "archives"
    make_tar(d / "notes.tar", [("a.jpg", fake_jpeg("a")), ("notes.txt", b"not an image\n"), ("b.jpg", fake_jpeg("b"))])
    make_zip(d / "nested.zip", [
        ("b/two.json", b'{"n": 2}'),
        ("a/three.json", b'{"n": 3}'),
        ("readme.txt", b"three json files in two directories\n"),
        ("a/one.json", b'{"n": 1}'),
    ])
    write(d / "hello.txt", b"hello")
    with tarfile.open(d / "notes.tar") as t:
        tar_members = t.getnames()
    with zipfile.ZipFile(d / "nested.zip") as z:
        zip_members = z.namelist()
    expected = {
        "notes.tar": {
            "sha256": sha256(d / "notes.tar"),
            "members": tar_members,
            "includes *.jpg": sorted(n for n in tar_members if n.endswith(".jpg") and "/" not in n),
        },
        "nested.zip": {
            "sha256": sha256(d / "nested.zip"),
            "members": zip_members,
            "includes **/*.json": sorted(n for n in zip_members if n.endswith(".json")),
        },
        "hello.txt": {"sha256": sha256(d / "hello.txt")},
        "pass/metadata.csv": {"sha256": sha256(DATA / "pass" / "metadata.csv")},
        "coco member": {
            "sha256": hashlib.sha256(
                zipfile.ZipFile(DATA / "coco" / "annotations_trainval2014.zip").read("annotations/instances_val2014.json")
            ).hexdigest()
        },
    }
    write_json(d / "expected.json", expected)


# Validator fault matrix. Expected issues are enumerated by hand from the
# seeded fault; report goldens are checked against them.

def build_faults(pass_doc, coco_doc):
    base = copy.deepcopy(pass_doc)
    base["datePublished"] = "2021-09-16"
    out = ROOT / "faults"

    def fs(doc):
        return doc["distribution"][2]

    def meta(doc):
        return doc["distribution"][0]

    def hash_field(doc):
        return doc["recordSet"][0]["field"][1]

    def no_name(d):
        del d["name"]

    def no_description(d):
        del d["description"]

    def bad_ref(d):
        fs(d)["containedIn"] = {"@id": "pass9"}

    def bad_key(d):
        d["recordSet"][0]["key"] = "images/nosuch"

    def bad_sha(d):
        meta(d)["sha256"] = meta(d)["sha256"][:20]

    def bad_glob(d):
        fs(d)["includes"] = "../*.jpg"

    def bad_regex(d):
        hash_field(d)["source"]["transform"] = {"regex": "([^\\/]*\\.jpg"}

    def bad_jsonpath(d):
        d["recordSet"][0]["field"][0]["source"]["extract"] = {"jsonPath": "$..image_id"}

    def no_conforms_no_description(d):
        del d["dct:conformsTo"]
        del d["description"]

    faults = {
        "missing-name": (base, [no_name], [("REQUIRED_MISSING", "dataset.name")]),
        "missing-description": (base, [no_description], [("REQUIRED_MISSING", "dataset.description")]),
        "bad-ref": (base, [bad_ref], [("REF_UNRESOLVED", "image-files.containedIn")]),
        "bad-key": (base, [bad_key], [("KEY_NOT_A_FIELD", "images.key")]),
        "bad-sha": (base, [bad_sha], [("SHA256_MALFORMED", "metadata.sha256")]),
        "bad-glob": (base, [bad_glob], [("GLOB_INVALID", "image-files.includes")]),
        "bad-regex": (base, [bad_regex], [("REGEX_INVALID", "images/hash.transform")]),
        "bad-jsonpath": (coco_doc, [bad_jsonpath], [("JSONPATH_INVALID", "images_with_bounding_box/image_id.extract")]),
        "missing-conforms-and-description": (base, [no_conforms_no_description], [
            ("REQUIRED_MISSING", "dataset.conformsTo"),
            ("REQUIRED_MISSING", "dataset.description"),
        ]),
        "ref-and-key": (base, [bad_ref, bad_key], [
            ("REF_UNRESOLVED", "image-files.containedIn"),
            ("KEY_NOT_A_FIELD", "images.key"),
        ]),
        "sha-and-glob": (base, [bad_sha, bad_glob], [
            ("GLOB_INVALID", "image-files.includes"),
            ("SHA256_MALFORMED", "metadata.sha256"),
        ]),
        "three-faults": (base, [no_name, bad_regex, bad_sha], [
            ("REQUIRED_MISSING", "dataset.name"),
            ("REGEX_INVALID", "images/hash.transform"),
            ("SHA256_MALFORMED", "metadata.sha256"),
        ]),
    }
    expected = {}
    for name, (doc, mutations, issues) in faults.items():
        d = copy.deepcopy(doc)
        for m in mutations:
            m(d)
        write_json(out / f"{name}.json", d)
        expected[name] = [{"code": c, "severity": "error", "path": p} for c, p in issues]
    write_json(out / "expected.json", expected)
    write_json(out / "clean.json", base)


# Health corpus: 20 documents, 5 seeded invalid.

def corpus_doc(title, n_fo, n_fs, fields_per_rs, geo=False):
    distribution = [{
        "@id": "table.csv",
        "@type": "cr:FileObject",
        "contentUrl": "https://example.org/table.csv",
        "encodingFormat": "text/csv",
        "sha256": hashlib.sha256(title.encode()).hexdigest(),
    }]
    for k in range(1, n_fo):
        distribution.append({
            "@id": f"archive{k}.tar",
            "@type": "cr:FileObject",
            "contentUrl": f"https://example.org/archive{k}.tar",
            "encodingFormat": "application/x-tar",
        })
    for k in range(n_fs):
        distribution.append({
            "@id": f"files{k}",
            "@type": "cr:FileSet",
            "containedIn": {"@id": "archive1.tar"},
            "includes": f"**/*.{['jpg', 'png', 'txt'][k % 3]}",
            "encodingFormat": ["image/jpeg", "image/png", "text/plain"][k % 3],
        })
    record_sets = []
    for r, n in enumerate(fields_per_rs):
        rs = f"rs{r}"
        fields = [
            {"@id": f"{rs}/c{c}", "@type": "cr:Field", "dataType": "sc:Text",
             "source": {"fileObject": {"@id": "table.csv"}, "extract": {"column": f"c{c}"}}}
            for c in range(n)
        ]
        if geo and r == 0:
            fields.append({
                "@id": f"{rs}/where", "@type": "cr:Field", "dataType": "sc:GeoCoordinates",
                "subField": [
                    {"@id": f"{rs}/where/latitude", "@type": "cr:Field",
                     "source": {"fileObject": {"@id": "table.csv"}, "extract": {"column": "lat"}}},
                    {"@id": f"{rs}/where/longitude", "@type": "cr:Field",
                     "source": {"fileObject": {"@id": "table.csv"}, "extract": {"column": "lon"}}},
                ],
            })
        record_sets.append({"@id": rs, "@type": "cr:RecordSet", "field": fields})
    return {
        "@context": CONTEXT,
        "@type": "sc:Dataset",
        "name": title,
        "description": f"Health corpus document {title}.",
        "conformsTo": CONFORMS,
        "license": "cc-by-4.0",
        "url": f"https://example.org/{title}",
        "citeAs": title,
        "datePublished": "2024-01-01",
        "distribution": distribution,
        "recordSet": record_sets,
    }


def doc_counts(n_fo, n_fs, fields_per_rs, geo):
    return {
        "fileObjects": n_fo,
        "fileSets": n_fs,
        "recordSets": len(fields_per_rs),
        "fields": sum(fields_per_rs) + (3 if geo else 0),
    }


def build_corpus():
    valid_specs = [
        (1, 0, [2], False),
        (2, 1, [3], False),
        (1, 0, [1, 4], False),
        (3, 2, [5], False),
        (2, 1, [2, 2], True),
        (1, 0, [7], False),
        (4, 3, [1, 1, 1], False),
        (2, 0, [6], False),
        (1, 0, [3], True),
        (2, 2, [4, 5], False),
        (3, 1, [2], False),
        (1, 0, [9], False),
        (2, 1, [3, 3, 3], False),
        (5, 0, [1], False),
        (2, 1, [8], True),
    ]
    invalid = {
        "missing-name": lambda d: d.pop("name"),
        "bad-ref": lambda d: d["recordSet"][0]["field"][0]["source"].update({"fileObject": {"@id": "nosuch"}}),
        "bad-sha": lambda d: d["distribution"][0].update({"sha256": "abc"}),
        "bad-regex": lambda d: d["recordSet"][0]["field"][0]["source"].update({"transform": {"regex": "(unclosed"}}),
        "bad-key": lambda d: d["recordSet"][0].update({"key": "rs0/missing"}),
    }
    out = ROOT / "corpus"
    per_doc = []
    for i, (n_fo, n_fs, rs, geo) in enumerate(valid_specs):
        title = f"valid-{i:02d}"
        write_json(out / f"{title}.json", corpus_doc(title, n_fo, n_fs, rs, geo))
        per_doc.append({"id": f"{title}.json", "status": "valid", **doc_counts(n_fo, n_fs, rs, geo)})
    for name, mutate in invalid.items():
        title = f"invalid-{name}"
        doc = corpus_doc(title, 2, 1, [3])
        mutate(doc)
        write_json(out / f"{title}.json", doc)
        per_doc.append({"id": f"{title}.json", "status": "invalid", **doc_counts(2, 1, [3], False)})
    per_doc.sort(key=lambda d: d["id"])
    valid = [d for d in per_doc if d["status"] == "valid"]
    aggregates = {}
    for metric in ["fileObjects", "fileSets", "recordSets", "fields"]:
        xs = [d[metric] for d in valid]
        aggregates[metric] = {"mean": statistics.fmean(xs), "stddev": statistics.pstdev(xs)}
    expected = {
        "total": len(per_doc),
        "downloaded": len(per_doc),
        "valid": len(valid),
        "invalid": len(per_doc) - len(valid),
        "invalidRate": (len(per_doc) - len(valid)) / len(per_doc),
        "aggregates": aggregates,
        "perDoc": per_doc,
    }
    write_json(GOLDEN / "corpus.expected.json", expected)

    out3 = ROOT / "corpus3"
    for i, n in enumerate([2, 4, 6]):
        write_json(out3 / f"doc{i}.json", corpus_doc(f"doc{i}", 1, 0, [n]))
    write_json(GOLDEN / "corpus3.expected.json", {
        "fields": {"mean": statistics.fmean([2, 4, 6]), "stddev": statistics.pstdev([2, 4, 6])},
    })


def build_infer():
    write_csv(DATA / "infer" / "sample.csv", ["id", "score", "observed"], [
        (1, "0.5", "2024-01-02"),
        (2, "1.25", "2024-02-03"),
        (3, "2", "2024-03-04"),
    ])


def main():
    pass_doc = build_pass()
    build_minipass()
    coco_doc = build_coco()
    build_split10()
    build_archives()
    build_faults(pass_doc, coco_doc)
    build_corpus()
    build_infer()


if __name__ == "__main__":
    main()
