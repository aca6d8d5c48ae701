"""
Ablation Service

Trains and scores each named architecture variant over several seeds and
summarizes the metrics with 95% confidence half-widths.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

from models import ValidationError
from nn import ablation_config, build
from .metrics import mean_confidence_interval
from .training import train_loop, score_windows

logger = logging.getLogger(__name__)


@dataclass
class AblationRow:
    name: str
    parameters: int
    trainable_parameters: int
    seeds: int
    accuracy: float
    accuracy_ci: float
    balanced_accuracy: float
    balanced_accuracy_ci: float
    mcc: float
    mcc_ci: float

    def to_dict(self):
        return dict(self.__dict__)


def _run_one(name, seed, data, model_config, train_cfg, augment_cfg):
    train_set, val_set, test_set = data
    config = ablation_config(name, model_config)
    network = build(config, seed)
    train_loop(network, train_set, val_set, replace(train_cfg, seed=seed), augment_cfg)
    eval_set = test_set if len(test_set) else val_set
    stacked, labels = eval_set.stack()
    _, report = score_windows(network, stacked, labels, train_cfg.focal_gamma)
    logger.info('ablation %s seed %d: acc %.3f mcc %.3f', name, seed, report.accuracy, report.mcc)
    return network, report


def run_ablation(names, data, model_config, train_cfg, augment_cfg, seeds, workers=1):
    """
    Train every (architecture, seed) pair and summarize per architecture.

    Args:
        names: architecture names ('full' or registry names)
        data: (train, val, test) WindowSets; scoring uses test, or val when test is empty
        seeds: iterable of integer seeds shared by every architecture
        workers: thread-pool size

    Returns:
        AblationRow list in the order of names
    """
    names = list(names)
    seeds = list(seeds)
    if not names or not seeds:
        raise ValidationError('ablation needs at least one architecture and one seed')
    if not len(data[1]) and not len(data[2]):
        raise ValidationError('ablation needs a non-empty validation or test set')
    for name in names:
        ablation_config(name, model_config)

    jobs = [(name, seed) for name in names for seed in seeds]
    with ThreadPoolExecutor(max_workers=max(int(workers), 1)) as pool:
        futures = [
            pool.submit(_run_one, name, seed, data, model_config, train_cfg, augment_cfg)
            for name, seed in jobs
        ]
        results = [future.result() for future in futures]

    rows = []
    for name in names:
        outcomes = [results[i] for i, (job_name, _) in enumerate(jobs) if job_name == name]
        network = outcomes[0][0]
        reports = [report for _, report in outcomes]
        accuracy = mean_confidence_interval([r.accuracy for r in reports])
        balanced = mean_confidence_interval([r.balanced_accuracy for r in reports])
        mcc = mean_confidence_interval([r.mcc for r in reports])
        rows.append(AblationRow(
            name=name,
            parameters=network.parameter_count(),
            trainable_parameters=network.parameter_count(trainable_only=True),
            seeds=len(reports),
            accuracy=accuracy[0],
            accuracy_ci=accuracy[1],
            balanced_accuracy=balanced[0],
            balanced_accuracy_ci=balanced[1],
            mcc=mcc[0],
            mcc_ci=mcc[1],
        ))
    return rows
