"""Planted two-population corpora for desk-scale checks of the whole pipeline."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from .corpus import RawPost, write_posts

# Empathy words lean on the social / family / positive-emotion categories of
# the bundled lexicon, threat words on money / work / inhibition / anger.
EMPATHY_WORDS = (
    "familia familias hermanos hermanas amigos amigas vecinos comunidad juntos compartir "
    "convivencia acoger recibir integracion ninos personas humanos esperanza alegria amor "
    "respeto dignidad solidaridad apoyo ayuda abrazo gracias paz hijos madres padres "
    "diversidad cultura oportunidad encuentro igualdad derechos companeros felices valiente acogida"
).split()
THREAT_WORDS = (
    "dinero plata impuestos pagar costos gastos bonos subsidios economia precios trabajo "
    "empleo desempleo sueldos salarios empresas contratos prohibir cerrar controlar "
    "restringir limites expulsar deportar frenar delincuencia violencia invasion ilegales "
    "colapso saturacion abuso robo crimen inseguridad miedo peligro caos deuda fisco"
).split()
NOISE_WORDS = (
    "chile haiti haitianos venezuela venezolanos peru peruanos colombia colombianos santiago "
    "antofagasta gobierno pinera proyecto ley reforma noticias carabineros pais migrantes "
    "inmigrantes migracion inmigracion ciudad tema nacional congreso presidente eleccion "
    "debate medios reportaje censo datos cifras region"
).split()
FILLER_STOPWORDS = "de la que el en y a los se del las por un para con una".split()

EMPATHY_SEEDS = (
    "#todossomosmigrantes", "#stopxenophobia", "#chilesinbarreras", "#chileterecibe",
    "#bienvenidosmigrantes", "#derribandomuros", "bienvenidos a chile",
)
THREAT_SEEDS = (
    "#vendepatria", "#nomasinmigrantes", "#nomasilegales", "#inmigrantesilegales",
    "inmigrantes delincuentes", "inmigracion descontrolada", "indeseables",
)


@dataclass(frozen=True)
class SyntheticSpec:
    n_users_per_attitude: int = 100
    posts_per_user: int = 5
    planted_vocab_size: int = 30
    noise_vocab_size: int = 30
    seed_user_fraction: float = 0.2
    seed_terms_per_post: int = 2
    noise_rate: float = 0.3
    intra_group_preference: float = 0.8
    retweet_rate: float = 0.2
    mention_rate: float = 0.3
    min_words: int = 8
    max_words: int = 16
    year: int = 2017
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("n_users_per_attitude", "posts_per_user", "planted_vocab_size", "noise_vocab_size", "min_words"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.max_words < self.min_words:
            raise ValueError("max_words must be >= min_words")
        if self.planted_vocab_size > min(len(EMPATHY_WORDS), len(THREAT_WORDS)):
            raise ValueError(f"planted_vocab_size is capped at {min(len(EMPATHY_WORDS), len(THREAT_WORDS))}")
        if self.noise_vocab_size > len(NOISE_WORDS):
            raise ValueError(f"noise_vocab_size is capped at {len(NOISE_WORDS)}")
        for name in ("seed_user_fraction", "noise_rate", "intra_group_preference", "retweet_rate", "mention_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")


@dataclass
class SyntheticCorpus:
    posts: list[RawPost]
    labels: dict[str, str]  # author_id -> empathy | threat
    seed_users: set[str]

    def write(self, corpus_path: str | Path, labels_path: str | Path) -> None:
        write_posts(self.posts, corpus_path)
        payload = {
            "labels": dict(sorted(self.labels.items())),
            "seed_users": sorted(self.seed_users),
        }
        Path(labels_path).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def generate_synthetic(spec: SyntheticSpec = SyntheticSpec()) -> SyntheticCorpus:
    rng = np.random.default_rng(spec.rng_seed)
    n = spec.n_users_per_attitude
    vocab = {
        "empathy": EMPATHY_WORDS[: spec.planted_vocab_size],
        "threat": THREAT_WORDS[: spec.planted_vocab_size],
    }
    seeds = {"empathy": EMPATHY_SEEDS, "threat": THREAT_SEEDS}
    noise = NOISE_WORDS[: spec.noise_vocab_size]

    users = [f"u{i:04d}" for i in range(2 * n)]
    perm = rng.permutation(2 * n)
    labels = {users[j]: ("empathy" if r < n else "threat") for r, j in enumerate(perm)}
    members = {g: sorted(u for u, lab in labels.items() if lab == g) for g in ("empathy", "threat")}
    n_seed = int(round(spec.seed_user_fraction * n))
    seed_users = set()
    for g in ("empathy", "threat"):
        seed_users.update(rng.choice(members[g], size=n_seed, replace=False).tolist())

    def pick_partner(user: str) -> str:
        own = labels[user]
        g = own if rng.random() < spec.intra_group_preference else ("threat" if own == "empathy" else "empathy")
        pool = [u for u in members[g] if u != user] or [u for u in users if u != user]
        return pool[rng.integers(len(pool))]

    def compose(author: str) -> str:
        group = labels[author]
        words = []
        for _ in range(rng.integers(spec.min_words, spec.max_words + 1)):
            if rng.random() < spec.noise_rate:
                pool = FILLER_STOPWORDS if rng.random() < 0.5 else noise
            else:
                pool = vocab[group]
            words.append(pool[rng.integers(len(pool))])
        if author in seed_users:
            for _ in range(spec.seed_terms_per_post):
                words.insert(rng.integers(len(words) + 1), seeds[group][rng.integers(len(seeds[group]))])
        return " ".join(words)

    start = datetime(spec.year, 1, 1, tzinfo=timezone.utc)
    span = (datetime(spec.year + 1, 1, 1, tzinfo=timezone.utc) - start).total_seconds()
    drafts = []
    for user in users:
        for _ in range(spec.posts_per_user):
            ts = start + timedelta(seconds=int(rng.integers(int(span))))
            if rng.random() < spec.retweet_rate:
                original = pick_partner(user)
                drafts.append((ts, user, compose(original), "retweet", original, ()))
                continue
            text = compose(user)
            mentions: tuple[str, ...] = ()
            if rng.random() < spec.mention_rate:
                target = pick_partner(user)
                mentions = (target,)
                text = f"@{target} {text}"
            drafts.append((ts, user, text, "original", None, mentions))
    drafts.sort(key=lambda d: (d[0], d[1]))
    posts = [
        RawPost(f"p{i:06d}", user, ts, text, kind, rt, mentions)
        for i, (ts, user, text, kind, rt, mentions) in enumerate(drafts)
    ]
    return SyntheticCorpus(posts, labels, seed_users)


def spec_dict(spec: SyntheticSpec) -> dict:
    return asdict(spec)
