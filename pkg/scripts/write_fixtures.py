"""
Writes generated instances to a directory as JSON instance files.

    python -m scripts.write_fixtures out/ --family coverage-uniform --n-list 8,16
    python -m scripts.write_fixtures out/ --random 20 --n 6

The output directory can be used as a suite through FIXTURES_DIR.
"""

from pathlib import Path
from typing import List, Optional, Sequence

import typer

from core.logging import get_logger, setup_logging
from repositories.instance import InstanceRepository, instance_repository
from scripts.utils import FAMILIES, family_instance, random_instance

logger = get_logger(__name__)


def write_family(
    out_dir: Path,
    family: str,
    n_list: Sequence[int],
    seed: int = 0,
    repository: InstanceRepository = instance_repository,
) -> List[Path]:
    paths = []
    for n in n_list:
        spec = family_instance(family, n, seed)
        paths.append(repository.save(spec, out_dir / f"{spec.name}.json"))
    logger.info("Family written", family=family, count=len(paths), out_dir=str(out_dir))
    return paths


def write_random(
    out_dir: Path,
    count: int,
    n: int,
    first_seed: int = 0,
    repository: InstanceRepository = instance_repository,
) -> List[Path]:
    paths = []
    for seed in range(first_seed, first_seed + count):
        spec = random_instance(seed, n)
        paths.append(repository.save(spec, out_dir / f"{spec.name}.json"))
    logger.info("Random instances written", count=len(paths), n=n, out_dir=str(out_dir))
    return paths


def main(
    out_dir: Path = typer.Argument(..., help="Target directory; created when missing."),
    family: Optional[str] = typer.Option(None, "--family", help="coverage-uniform | cut-partition"),
    n_list: str = typer.Option("8,16,32", "--n-list"),
    random: int = typer.Option(0, "--random", min=0, help="Number of random instances."),
    n: int = typer.Option(6, "--n", min=1, help="Size of the random instances."),
    seed: int = typer.Option(0, "--seed"),
) -> None:
    setup_logging()
    if family is not None:
        if family not in FAMILIES:
            raise typer.BadParameter(f"unknown family {family!r}", param_hint="--family")
        sizes = [int(piece) for piece in n_list.split(",") if piece.strip()]
        write_family(out_dir, family, sizes, seed)
    if random:
        write_random(out_dir, random, n, seed)


if __name__ == "__main__":
    typer.run(main)
