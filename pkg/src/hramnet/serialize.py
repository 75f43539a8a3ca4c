"""
JSON form of nets, the compiler's on-disk IR.

Port names are written as hex strings; code fragments use the list form
from `src.hram.code`.
"""
import json
import logging

from src.errors import ValidationError
from src.hram.code import code_from_json, code_to_json
from src.hram.engine import Engine, ValidationReport
from src.hramnet.net import Net
from src.nominal import Interface, Polarity

FORMAT_VERSION = 1


def _hex(name):
    return f"{name:#x}"


def _atom(text):
    return int(text, 16) if isinstance(text, str) else int(text)


def interface_to_json(a: Interface):
    return [[str(pol), _hex(name)] for name, pol in a.items()]


def interface_from_json(items) -> Interface:
    return Interface.of(*((Polarity(pol), _atom(name)) for pol, name in items))


def engine_to_json(e: Engine):
    return {
        "label": e.label,
        "placement": e.placement,
        "interface": interface_to_json(e.interface),
        "code": {_hex(port): code_to_json(code) for port, code in e.port_map.items()},
    }


def engine_from_json(doc) -> Engine:
    return Engine(
        interface=interface_from_json(doc["interface"]),
        port_map={_atom(p): code_from_json(c) for p, c in doc["code"].items()},
        label=doc.get("label", ""),
        placement=doc.get("placement"),
    )


def net_to_json(s: Net):
    return {
        "version": FORMAT_VERSION,
        "engines": [engine_to_json(e) for e in s.engines],
        "chi": {_hex(a): _hex(b) for a, b in s.chi.items()},
        "external": interface_to_json(s.external),
        "domain": sorted(_hex(p) for p in s.domain),
    }


def net_from_json(doc) -> Net:
    try:
        if doc.get("version", FORMAT_VERSION) != FORMAT_VERSION:
            raise ValueError(f"unsupported IR version {doc['version']}")
        return Net(
            tuple(engine_from_json(e) for e in doc["engines"]),
            {_atom(a): _atom(b) for a, b in doc["chi"].items()},
            interface_from_json(doc["external"]),
            frozenset(_atom(p) for p in doc.get("domain", [])),
        )
    except (KeyError, TypeError, ValueError) as e:
        report = ValidationReport("net document")
        report.add(f"malformed: {e}")
        raise ValidationError(report) from None


def write_json(path, doc):
    with open(path, "w") as f:
        json.dump(doc, f, indent=2)
    logging.info(f"wrote {path}")


def read_json(path):
    with open(path) as f:
        return json.load(f)
