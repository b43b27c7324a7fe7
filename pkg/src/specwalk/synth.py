"""Synthetic graph generators with known planted structure.

These live with the CLI layer so the library modules stay dataset-agnostic.
All generators are deterministic given their seed and return graphs whose
ground-truth relevance structure is known by construction:

* layered_graph: a typed entity population with one relationship per layer
  spec, each engineered to a target incoming-path ratio (its specificity).
  In-degrees are balanced so the bidirectional estimator's reverse-walk
  probability coincides with the exact path-count ratio.
* relevance_inversion_graph: a high-frequency hub chain vs a low-frequency
  entity-specific chain, for the frequency/specificity ranking inversion.
* franchise_graph: film franchises sharing a director/style chain, plus
  shared hub categories/actors and untyped noise, for the end-to-end
  recommendation benchmark.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .graph import RDF_TYPE, Graph, GraphBuilder

EX = "http://synth.specwalk.local/"


@dataclass
class RelSpec:
    """One planted relationship layer.

    rho is the engineered specificity of the depth-1 relationship; ext, when
    set, plants a depth-2 extension (predicate name, rho2, target count) with
    rho2 <= rho.
    """

    name: str
    rho: float
    n_targets: int
    coverage: float = 1.0
    ext: tuple[str, float, int] | None = None


DEFAULT_RELS = (
    RelSpec("own", 1.0, 100, ext=("trait", 0.6, 50)),
    RelSpec("near", 0.8, 20, coverage=0.9, ext=("beyond", 0.35, 10)),
    RelSpec("group", 0.5, 12, coverage=0.95),
    RelSpec("area", 0.25, 8),
    RelSpec("hub", 0.08, 4),
)


def layered_graph(seed: int = 0, n_entities: int = 100, n_noise: int = 500,
                  rels: tuple[RelSpec, ...] = DEFAULT_RELS,
                  type_iri: str = EX + "class/Entity") -> tuple[Graph, dict]:
    """Typed entities with relationship layers of known specificity."""
    rng = random.Random(seed)
    b = GraphBuilder()
    entities = [EX + f"e/{i}" for i in range(n_entities)]
    for e in entities:
        b.add(e, RDF_TYPE, type_iri)
    noise = [EX + f"noise/{i}" for i in range(n_noise)]
    info: dict[str, dict] = {}

    for spec in rels:
        pred = EX + f"p/{spec.name}"
        noise_pred = EX + f"p/to_{spec.name}"
        targets = [EX + f"n/{spec.name}/{j}" for j in range(spec.n_targets)]
        covered = [e for e in entities if rng.random() < spec.coverage] \
            if spec.coverage < 1.0 else list(entities)
        rng.shuffle(covered)
        per_target = max(1, len(covered) // spec.n_targets)
        # round-robin assignment truncated to equal entity in-degree per target
        assigned: dict[str, list[str]] = {t: [] for t in targets}
        for i, e in enumerate(covered):
            assigned[targets[i % spec.n_targets]].append(e)
        for t, members in assigned.items():
            for e in members[:per_target]:
                b.add(e, pred, t)
        a = per_target
        noise_per_target = round(a * (1.0 - spec.rho) / spec.rho) if spec.rho < 1.0 else 0
        if noise_per_target > n_noise:
            raise ValueError(f"n_noise too small for rho={spec.rho}")
        for t in targets:
            for u in rng.sample(noise, noise_per_target):
                b.add(u, noise_pred, t)
        k1 = a + noise_per_target  # uniform in-degree of every target
        info[spec.name] = {"pred": pred, "rho": a / k1, "targets": targets,
                           "in_degree": k1}

        if spec.ext is not None:
            ext_name, rho2, n2 = spec.ext
            pred2 = EX + f"p/{ext_name}"
            rho1 = a / k1
            if rho2 > rho1:
                raise ValueError("extension rho2 must not exceed rho")
            ext_targets = [EX + f"n/{ext_name}/{j}" for j in range(n2)]
            for j, t in enumerate(targets):
                b.add(t, pred2, ext_targets[j % n2])
            c = max(1, len(targets) // n2)  # template in-edges per ext target
            # extra reverse branches through balanced noise intermediates
            w_edges = round(c * (rho1 / rho2 - 1.0)) if rho2 < rho1 else 0
            for j, u in enumerate(ext_targets):
                for w_i in range(w_edges):
                    w = EX + f"w/{ext_name}/{j}_{w_i}"
                    b.add(w, pred2, u)
                    for src in rng.sample(noise, k1):
                        b.add(src, noise_pred, w)
            info[ext_name] = {"pred2": (pred, pred2),
                              "rho": rho1 * c / (c + w_edges),
                              "targets": ext_targets}
    graph = b.build()
    return graph, {"type": type_iri, "rels": info, "n_entities": n_entities}


def relevance_inversion_graph(seed: int = 0, n_films: int = 30,
                              hub_fanout: int = 50, n_cats: int = 60,
                              n_noise: int = 200) -> tuple[Graph, dict]:
    """Entity-specific chain vs a hub chain with >= hub_fanout x frequency."""
    rng = random.Random(seed)
    b = GraphBuilder()
    film_type = EX + "class/Film"
    director = EX + "p/director"
    known_for = EX + "p/knownFor"
    subject = EX + "p/subject"
    mention = EX + "p/mention"
    link = EX + "p/link"
    cats = [EX + f"cat/{j}" for j in range(n_cats)]
    noise = [EX + f"noise/{i}" for i in range(n_noise)]
    for i in range(n_films):
        film = EX + f"film/{i}"
        d = EX + f"person/{i}"
        b.add(film, RDF_TYPE, film_type)
        b.add(film, director, d)
        b.add(d, known_for, EX + f"style/{i}")
        for c in rng.sample(cats, hub_fanout):
            b.add(d, subject, c)
    for c in cats:
        for u in rng.sample(noise, 30):
            b.add(u, mention, c)
    for i, u in enumerate(noise):
        b.add(noise[(i + 1) % n_noise], link, u)
        b.add(noise[(i + 7) % n_noise], link, u)
    graph = b.build()
    return graph, {
        "type": film_type,
        "specific_chain": (director, known_for),
        "hub_chain": (director, subject),
        "specific_frequency": n_films,
        "hub_frequency": n_films * hub_fanout,
    }


def franchise_graph(seed: int = 0, n_franchises: int = 5, films_per: int = 4,
                    n_distractor_films: int = 10, n_noise: int = 80
                    ) -> tuple[Graph, dict]:
    """Planted film franchises with a specific director/style/movement chain
    and shared category/actor hubs polluting unbiased walks."""
    rng = random.Random(seed)
    b = GraphBuilder()
    film_type = EX + "class/Film"
    director = EX + "p/director"
    known_for = EX + "p/knownFor"
    subject = EX + "p/subject"
    starring = EX + "p/starring"
    birth_place = EX + "p/birthPlace"
    genre = EX + "p/genre"
    link = EX + "p/link"
    cats = [EX + f"cat/{j}" for j in range(4)]
    actors = [EX + f"actor/{j}" for j in range(8)]
    cities = [EX + f"city/{j}" for j in range(3)]
    hub_pool = cats + actors + cities

    def add_film(iri: str, dir_iri: str) -> None:
        b.add(iri, RDF_TYPE, film_type)
        b.add(iri, director, dir_iri)
        for c in rng.sample(cats, 2):
            b.add(iri, subject, c)
        for a in rng.sample(actors, 2):
            b.add(iri, starring, a)

    truth: dict[str, list[str]] = {}
    for f in range(n_franchises):
        d = EX + f"person/dir{f}"
        style = EX + f"style/{f}"
        b.add(d, known_for, style)
        b.add(d, birth_place, rng.choice(cities))
        b.add(style, genre, EX + f"movement/{f}")
        films = [EX + f"film/f{f}_{i}" for i in range(films_per)]
        for film in films:
            add_film(film, d)
        for film in films:
            truth[film] = sorted(set(films) - {film})
    for j in range(n_distractor_films):
        d = EX + f"person/xdir{j}"
        style = EX + f"style/x{j}"
        b.add(d, known_for, style)
        b.add(d, birth_place, rng.choice(cities))
        b.add(style, genre, EX + f"movement/x{j}")
        add_film(EX + f"film/x{j}", d)
    noise = [EX + f"noise/{i}" for i in range(n_noise)]
    for i, u in enumerate(noise):
        for t in rng.sample(hub_pool, 4):
            b.add(u, link, t)
        b.add(noise[(i + 1) % n_noise], link, u)
        b.add(noise[(i + 13) % n_noise], link, u)
    graph = b.build()
    return graph, {
        "type": film_type,
        "truth": truth,
        "specific_chain": (director, known_for),
        "depth3_chain": (director, known_for, genre),
    }


def sensitivity_fixture(seed: int = 0) -> tuple[Graph, dict]:
    """~1k-node fixture with well-separated depth-1 specificities, for the
    estimator-budget sensitivity sweeps."""
    rels = (
        RelSpec("r95", 0.95, 16),
        RelSpec("r85", 0.85, 16, coverage=0.9),
        RelSpec("r70", 0.70, 12),
        RelSpec("r55", 0.55, 12, coverage=0.85),
        RelSpec("r45", 0.45, 10),
        RelSpec("r30", 0.30, 10, coverage=0.9),
        RelSpec("r15", 0.15, 16),
        RelSpec("r05", 0.05, 40),
    )
    return layered_graph(seed=seed, n_entities=400, n_noise=450, rels=rels)
