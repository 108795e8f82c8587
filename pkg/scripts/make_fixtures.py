#!/usr/bin/env python3
"""Regenerate the committed test fixtures.

Builds the JSON corpus, records replay fixtures for every query the test
suite replays (by running the real client against the local mock service
through the recording transport), writes the sample LaTeX project, and
freezes the golden post-selection files.

Run from the repository root:  python3 scripts/make_fixtures.py
"""

from __future__ import annotations

import json
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from incite.ads import AdsClient, HttpTransport, RecordingTransport, ReplayTransport
from incite.config import InciteConfig
from incite.cue import SearchMode, parse_cue
from incite.mockscix import MockScixServer, load_corpus
from incite.pipeline import plan_selection, resolve
from incite.query import AdsQuery, build_query, widen_query
from incite.edit import apply_edits

FIXTURES = REPO / "tests" / "fixtures"
RESET_AT = 1755000000  # frozen so regenerated fixtures stay byte-stable


def ads_entry(
    bibcode: str,
    authors: list[str],
    title: str,
    year: int,
    pub: str,
    citation_count: int,
    abstract: str,
    doi: str | None = None,
    volume: str = "1",
    pages: str = "1",
) -> dict:
    """One corpus record with an ADS-style BibTeX export embedded."""
    encoded = bibcode.replace("&", "%26")
    bib_authors = " and ".join(
        "{%s}, %s" % (a.split(",")[0].strip(), a.split(",", 1)[1].strip())
        if "," in a
        else "{%s}" % a
        for a in authors
    )
    lines = [
        "@ARTICLE{%s," % bibcode,
        "       author = {%s}," % bib_authors,
        '        title = "{%s}",' % title,
        "      journal = {%s}," % pub,
        "         year = %d," % year,
        "       volume = {%s}," % volume,
        "        pages = {%s}," % pages,
    ]
    if doi:
        lines.append("          doi = {%s}," % doi)
    lines += [
        "       adsurl = {https://ui.adsabs.harvard.edu/abs/%s}," % encoded,
        "      adsnote = {Provided by the SAO/NASA Astrophysics Data System}",
        "}",
    ]
    return {
        "bibcode": bibcode,
        "authors": authors,
        "title": title,
        "year": year,
        "pub": pub,
        "citation_count": citation_count,
        "abstract": abstract,
        "doi": doi,
        "bibtex": "\n".join(lines) + "\n",
    }


CORPUS = [
    ads_entry(
        "2025ApJ...985...10S",
        ["Shariat, C.", "Naoz, S."],
        "Wide Stellar Triples Drive White Dwarf Mergers",
        2025,
        "The Astrophysical Journal",
        12,
        "Numerical models of wide hierarchies show that distant tertiary "
        "companions drive white dwarf binaries toward merger through "
        "eccentricity oscillations.",
        doi="10.3847/1538-4357/fixture01",
        volume="985",
        pages="10",
    ),
    ads_entry(
        "2025MNRAS.540..200S",
        ["Shariat, C.", "El-Badry, K."],
        "Orbital Decay of Compact Binaries in the Galactic Field",
        2025,
        "Monthly Notices of the Royal Astronomical Society",
        30,
        "We measure orbital decay rates for a volume-limited sample of "
        "compact binaries using multi-epoch astrometry.",
        doi="10.1093/mnras/fixture02",
        volume="540",
        pages="200",
    ),
    ads_entry(
        "2024ApJ...970...55S",
        ["Shariat, C."],
        "Eccentricity Oscillations in Hierarchical Stellar Systems",
        2024,
        "The Astrophysical Journal",
        8,
        "Long-term secular evolution excites eccentricity oscillations in "
        "hierarchical stellar systems.",
        doi="10.3847/1538-4357/fixture03",
        volume="970",
        pages="55",
    ),
    ads_entry(
        "2025AJ....169...40S",
        ["Smith, Jane", "Lee, K."],
        "Spectroscopy of Metal-Poor Halo Stars",
        2025,
        "The Astronomical Journal",
        120,
        "High-resolution spectroscopy of metal-poor stars in the Galactic "
        "halo constrains early chemical enrichment.",
        doi="10.3847/1538-3881/fixture04",
        volume="169",
        pages="40",
    ),
    ads_entry(
        "2025ApJ...990...77S",
        ["Smith, Aaron", "Jones, B."],
        "Radiative Transfer in Reionization-Era Galaxies",
        2025,
        "The Astrophysical Journal",
        45,
        "We post-process cosmological simulations with radiative transfer "
        "to model Lyman-alpha escape during reionization.",
        doi="10.3847/1538-4357/fixture05",
        volume="990",
        pages="77",
    ),
    ads_entry(
        "2025MNRAS.541..318D",
        ["Doe, R.", "Smith, Bob"],
        "Weak Lensing Profiles of Galaxy Clusters",
        2025,
        "Monthly Notices of the Royal Astronomical Society",
        7,
        "Stacked weak lensing measurements constrain the mass profiles of "
        "optically selected galaxy clusters.",
        doi="10.1093/mnras/fixture06",
        volume="541",
        pages="318",
    ),
    ads_entry(
        "2021A&A...649A...1G",
        ["Gaia Collaboration", "Brown, A. G. A.", "Vallenari, A."],
        "Survey Astrometry Data Release: Catalogue Contents and Properties",
        2021,
        "Astronomy and Astrophysics",
        5000,
        "We describe the contents, astrometric solution, and validation of "
        "the space-astrometry survey data release.",
        doi="10.1051/0004-6361/fixture07",
        volume="649",
        pages="A1",
    ),
    ads_entry(
        "2016PhRvL.116f1102A",
        ["Abbott, B. P.", "Abbott, R.", "Abbott, T. D."],
        "Direct Detection of Gravitational Waves from a Binary Black Hole Coalescence",
        2016,
        "Physical Review Letters",
        12000,
        "We report the first direct observation of gravitational waves from "
        "the coalescence of a binary black hole system.",
        doi="10.1103/PhysRevLett.fixture08",
        volume="116",
        pages="061102",
    ),
    ads_entry(
        "2017PhRvL.119p1101A",
        ["Abbott, B. P.", "Abbott, R."],
        "Gravitational Waves and Light from a Binary Neutron Star Merger",
        2017,
        "Physical Review Letters",
        11000,
        "Joint gravitational-wave and electromagnetic observations of a "
        "binary neutron star merger.",
        doi="10.1103/PhysRevLett.fixture09",
        volume="119",
        pages="161101",
    ),
    ads_entry(
        "1975CMaPh..43..199H",
        ["Hawking, S. W."],
        "Thermal Emission from Gravitationally Collapsed Objects",
        1975,
        "Communications in Mathematical Physics",
        8000,
        "Quantum effects cause gravitationally collapsed objects to create "
        "and emit particles with a thermal spectrum.",
        volume="43",
        pages="199",
    ),
    ads_entry(
        "1998ApJ...500..525S",
        ["Schlegel, D. J.", "Finkbeiner, D. P.", "Davis, M."],
        "Infrared Maps of Galactic Dust Emission for Reddening Estimation",
        1998,
        "The Astrophysical Journal",
        15000,
        "We present full-sky maps of dust infrared emission and calibrate "
        "them as reddening and extinction estimates.",
        doi="10.1086/fixture10",
        volume="500",
        pages="525",
    ),
    ads_entry(
        "2013PASP..125..306F",
        ["Foreman-Mackey, D.", "Hogg, D. W.", "Lang, D.", "Goodman, J."],
        "emcee: A Python Ensemble Sampler for Bayesian Posterior Exploration",
        2013,
        "Publications of the Astronomical Society of the Pacific",
        9000,
        "A pure-Python implementation of an affine-invariant ensemble "
        "sampler for Markov chain Monte Carlo.",
        doi="10.1086/fixture11",
        volume="125",
        pages="306",
    ),
    ads_entry(
        "2013A&A...558A..33A",
        ["Astropy Collaboration", "Robitaille, T. P."],
        "A Community Python Package for Astronomy",
        2013,
        "Astronomy and Astrophysics",
        6000,
        "We present a community-developed core Python package providing "
        "common astronomy utilities and data structures.",
        doi="10.1051/0004-6361/fixture12",
        volume="558",
        pages="A33",
    ),
    ads_entry(
        "2022ApJ...935..167A",
        ["Astropy Collaboration", "Price-Whelan, A. M."],
        "Ecosystem and Core Library Updates of a Community Astronomy Package",
        2022,
        "The Astrophysical Journal",
        2500,
        "Updates to the interoperable astronomy software ecosystem and its "
        "core library.",
        doi="10.3847/1538-4357/fixture13",
        volume="935",
        pages="167",
    ),
]


MAIN_TEX = """\\documentclass{article}
\\begin{document}
\\section{Introduction}

Close binary systems have long been studied as sources of
gravitational waves \\citep{Abbott}.

Stellar triples drive white dwarf mergers in wide hierarchies
\\citep{Shariat25}.

\\bibliography{refs}
\\end{document}
"""

REFS_BIB = """@ARTICLE{Hawking1975,
       author = {{Hawking}, S.~W.},
        title = "{Thermal Emission from Gravitationally Collapsed Objects}",
      journal = {Communications in Mathematical Physics},
         year = 1975,
       volume = {43},
        pages = {199-220},
       adsurl = {https://ui.adsabs.harvard.edu/abs/1975CMaPh..43..199H},
      adsnote = {Provided by the SAO/NASA Astrophysics Data System}
}
"""


def record_replays(base_url: str, replay_dir: Path) -> None:
    transport = RecordingTransport(HttpTransport(base_url), replay_dir)
    client = AdsClient(token="fixture-token", transport=transport, retry_wait=0)

    searches = [
        build_query(parse_cue("Shariat25", SearchMode.CONTEXTUAL)),
        build_query(parse_cue("Shariat25", SearchMode.SIMPLE)),
        build_query(parse_cue("Abbott", SearchMode.CONTEXTUAL)),
        build_query(parse_cue("Smith25", SearchMode.CONTEXTUAL)),
        build_query(parse_cue("Smith25", SearchMode.SIMPLE)),
        build_query(parse_cue("SmithJ25", SearchMode.SIMPLE)),
        build_query(parse_cue("Hawking1975", SearchMode.SIMPLE)),
        build_query(parse_cue("Gaia Collaboration2021", SearchMode.CONTEXTUAL)),
        build_query(parse_cue("Astropy Collaboration", SearchMode.CONTEXTUAL)),
        build_query(parse_cue('title:"emcee"', SearchMode.CONTEXTUAL)),
        AdsQuery(q='bibcode:"2025ApJ...985...10S"', rows=1),
        AdsQuery(q='bibcode:"2016PhRvL.116f1102A"', rows=1),
    ]
    # widening ladders: a surname with no match at all, and a year miss
    # that the +/-1 range rescues
    for raw in ("Zzyzxq25", "Shariat26"):
        ghost = parse_cue(raw, SearchMode.CONTEXTUAL)
        ladder = [build_query(ghost)]
        for attempt in (1, 2, 3):
            wider = widen_query(ladder[-1], ghost, attempt)
            if wider is not None and all(wider.q != q.q for q in ladder):
                ladder.append(wider)
        searches.extend(ladder)

    for query in searches:
        client.search(query)
    client.export_bibtex(["2025ApJ...985...10S"])
    client.export_bibtex(["2016PhRvL.116f1102A"])


def freeze_scan_golden(project_dir: Path, golden_dir: Path) -> None:
    import contextlib
    import io
    import os

    from incite.cli import main as cli_main

    golden_dir.mkdir(parents=True, exist_ok=True)
    buffer = io.StringIO()
    cwd = os.getcwd()
    try:
        os.chdir(project_dir)
        with contextlib.redirect_stdout(buffer):
            code = cli_main(["scan", "main.tex", "--json"])
    finally:
        os.chdir(cwd)
    assert code == 1, f"expected unresolved keys in the sample project, got exit {code}"
    (golden_dir / "scan.json").write_text(buffer.getvalue(), encoding="utf-8")


def freeze_golden(replay_dir: Path, project_dir: Path, golden_dir: Path) -> None:
    with tempfile.TemporaryDirectory() as tmp:
        work = Path(tmp) / "project"
        shutil.copytree(project_dir, work)
        tex_path = work / "main.tex"
        text = tex_path.read_text(encoding="utf-8")
        offset = text.encode("utf-8").index(b"Shariat25")
        client = AdsClient(transport=ReplayTransport(replay_dir))
        config = InciteConfig()
        outcome = resolve(text, offset, client=client, config=config)
        assert outcome.candidates[0].record.bibcode == "2025ApJ...985...10S"
        edit = plan_selection(
            text,
            offset,
            outcome.candidates[0].record.bibcode,
            client=client,
            config=config,
            base_dir=work,
            tex_path=tex_path,
        )
        apply_edits(edit, write_tex=True)
        golden_dir.mkdir(parents=True, exist_ok=True)
        (golden_dir / "main_after.tex").write_bytes(tex_path.read_bytes())
        (golden_dir / "refs_after.bib").write_bytes((work / "refs.bib").read_bytes())


def main() -> int:
    corpus_path = FIXTURES / "corpus.json"
    replay_dir = FIXTURES / "replay"
    project_dir = FIXTURES / "project"
    golden_dir = FIXTURES / "golden"

    FIXTURES.mkdir(parents=True, exist_ok=True)
    corpus_path.write_text(json.dumps(CORPUS, indent=2) + "\n", encoding="utf-8")

    if replay_dir.exists():
        shutil.rmtree(replay_dir)
    replay_dir.mkdir(parents=True)

    project_dir.mkdir(parents=True, exist_ok=True)
    (project_dir / "main.tex").write_text(MAIN_TEX, encoding="utf-8")
    (project_dir / "refs.bib").write_text(REFS_BIB, encoding="utf-8")

    server = MockScixServer(load_corpus(corpus_path), limit=5000, reset_at=RESET_AT).start()
    try:
        record_replays(server.base_url, replay_dir)
    finally:
        server.stop()

    freeze_golden(replay_dir, project_dir, golden_dir)
    freeze_scan_golden(project_dir, golden_dir)
    print(f"corpus:  {corpus_path}")
    print(f"replay:  {len(list(replay_dir.glob('*.json')))} fixtures")
    print(f"golden:  {golden_dir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
