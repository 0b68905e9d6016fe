"""
Thread-pool helpers for independent, seeded tasks
"""

import concurrent.futures
from typing import Callable, List, Optional, Sequence, TypeVar

import numpy as np
import tqdm

from .config import config

T = TypeVar("T")
R = TypeVar("R")


def spawn_streams(seed: int, count: int) -> List[np.random.Generator]:
    """One independent generator per task; stream i depends only on (seed, i)."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.default_rng(child) for child in children]


def run_tasks(
    worker: Callable[[T], R],
    tasks: Sequence[T],
    desc: Optional[str] = None,
    progress: bool = False,
) -> List[R]:
    """Run ``worker`` over ``tasks`` and return the results in task order."""
    n_workers = config.worker_count(len(tasks))
    results: List[Optional[R]] = [None] * len(tasks)
    with tqdm.tqdm(total=len(tasks), desc=desc, leave=False, disable=not progress) as pbar:
        if n_workers == 1:
            for i, task in enumerate(tasks):
                results[i] = worker(task)
                pbar.update(1)
        else:
            with concurrent.futures.ThreadPoolExecutor(max_workers=n_workers) as executor:
                futures = {executor.submit(worker, task): i for i, task in enumerate(tasks)}
                for future in concurrent.futures.as_completed(futures):
                    results[futures[future]] = future.result()
                    pbar.update(1)
    return results
