"""
Training Service

Ranger optimization (RAdam with Lookahead), the delayed cosine learning-rate
schedule and the epoch loop with fresh SNR augmentation every epoch.

Every epoch draws its randomness from a generator seeded with (seed, epoch),
so a run resumed at epoch e repeats the uninterrupted run exactly.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from models import ValidationError
from nn.losses import focal_loss
from .augment import augment_batch
from .metrics import evaluate

logger = logging.getLogger(__name__)

RECTIFY_THRESHOLD = 5.0
EVAL_CHUNK = 1024

HISTORY_COLUMNS = (
    'epoch', 'lr', 'train_loss', 'train_acc', 'val_loss', 'val_acc', 'val_balacc', 'val_mcc',
)


# =========== CONFIGURATION ===========

@dataclass(frozen=True)
class TrainConfig:
    """Epoch loop and Ranger hyperparameters."""
    epochs: int = 55
    batch_size: int = 128
    lr_start: float = 1e-3
    lr_end: float = 1e-5
    warm_epochs: int = 5
    focal_gamma: float = 2.0
    betas: tuple = (0.9, 0.999)
    eps: float = 1e-8
    lookahead_k: int = 6
    lookahead_alpha: float = 0.5
    seed: int = 0
    augment: bool = True

    def __post_init__(self):
        if self.epochs < 1:
            raise ValidationError(f'epochs must be >= 1, got {self.epochs}')
        if self.batch_size < 1:
            raise ValidationError(f'batch_size must be >= 1, got {self.batch_size}')
        if not 0 < self.lr_end < self.lr_start:
            raise ValidationError(f'need 0 < lr_end < lr_start, got {self.lr_end} and {self.lr_start}')
        if not 0 <= self.warm_epochs < self.epochs:
            raise ValidationError(f'warm_epochs must be in [0, epochs), got {self.warm_epochs}')
        if self.focal_gamma < 0:
            raise ValidationError('focal_gamma must be >= 0')
        if self.lookahead_k < 1 or not 0.0 <= self.lookahead_alpha <= 1.0:
            raise ValidationError('lookahead needs k >= 1 and alpha in [0, 1]')
        object.__setattr__(self, 'betas', tuple(float(b) for b in self.betas))

    @classmethod
    def from_config(cls, cfg, seed, **overrides):
        """Preset values plus overrides; the preset warm-up is capped below a shorter epoch count."""
        values = dict(
            epochs=cfg.EPOCHS,
            batch_size=cfg.BATCH_SIZE,
            lr_start=cfg.LR_START,
            lr_end=cfg.LR_END,
            warm_epochs=cfg.WARM_EPOCHS,
            focal_gamma=cfg.FOCAL_GAMMA,
            betas=cfg.RADAM_BETAS,
            eps=cfg.RADAM_EPS,
            lookahead_k=cfg.LOOKAHEAD_K,
            lookahead_alpha=cfg.LOOKAHEAD_ALPHA,
            seed=seed,
        )
        values.update({k: v for k, v in overrides.items() if v is not None})
        if overrides.get('warm_epochs') is None:
            values['warm_epochs'] = max(min(values['warm_epochs'], values['epochs'] - 1), 0)
        return cls(**values)

    def to_dict(self):
        return {
            'epochs': self.epochs,
            'batch_size': self.batch_size,
            'lr_start': self.lr_start,
            'lr_end': self.lr_end,
            'warm_epochs': self.warm_epochs,
            'focal_gamma': self.focal_gamma,
            'betas': list(self.betas),
            'eps': self.eps,
            'lookahead_k': self.lookahead_k,
            'lookahead_alpha': self.lookahead_alpha,
            'seed': self.seed,
            'augment': self.augment,
        }


# =========== OPTIMIZER ===========

@dataclass
class OptState:
    """First/second moments, step counter and Lookahead slow weights, keyed by parameter name."""
    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    slow: dict = field(default_factory=dict)

    @classmethod
    def initial(cls, params):
        return cls(
            m={name: np.zeros_like(p) for name, p in params.items()},
            v={name: np.zeros_like(p) for name, p in params.items()},
            slow={name: p.copy() for name, p in params.items()},
        )

    def arrays(self):
        """Flat name -> array mapping for checkpoints."""
        out = {}
        for prefix in ('m', 'v', 'slow'):
            for name, value in getattr(self, prefix).items():
                out[f'{prefix}/{name}'] = value
        return out

    @classmethod
    def from_arrays(cls, step, arrays):
        state = cls(step=int(step))
        for key, value in arrays.items():
            prefix, name = key.split('/', 1)
            getattr(state, prefix)[name] = np.array(value, dtype=np.float64)
        return state


def rho_t(step, beta2=0.999):
    """Length of the approximated simple moving average at a step."""
    rho_inf = 2.0 / (1.0 - beta2) - 1.0
    beta2_t = beta2 ** step
    return rho_inf - 2.0 * step * beta2_t / (1.0 - beta2_t)


def radam_step(params, grads, state, lr, betas=(0.9, 0.999), eps=1e-8):
    """
    One rectified Adam update, in place.

    While rho_t < 5 the variance estimate is untrustworthy and the update is
    bias-corrected momentum SGD; afterwards the adaptive step is scaled by the
    rectification term.
    """
    beta1, beta2 = betas
    state.step += 1
    step = state.step
    rho_inf = 2.0 / (1.0 - beta2) - 1.0
    rho = rho_t(step, beta2)
    beta2_t = beta2 ** step
    rectified = rho >= RECTIFY_THRESHOLD
    if rectified:
        rect = math.sqrt(
            (1.0 - beta2_t) * (rho - 4.0) / (rho_inf - 4.0) * (rho - 2.0) / rho * rho_inf / (rho_inf - 2.0)
        )

    for name, p in params.items():
        g = grads[name]
        if p.shape != g.shape:
            raise ValidationError(f'{name}: gradient shape {g.shape} differs from parameter {p.shape}')
        m = state.m.setdefault(name, np.zeros_like(p))
        v = state.v.setdefault(name, np.zeros_like(p))
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * g * g
        if rectified:
            p -= (lr * rect / (1.0 - beta1 ** step)) * m / (np.sqrt(v) + eps)
        else:
            p -= (lr / (1.0 - beta1 ** step)) * m
    return params, state


def lookahead_sync(fast, slow, k, alpha, step):
    """
    Every k steps: slow += alpha (fast - slow), then fast <- slow.

    Returns:
        True when a sync happened
    """
    if step == 0 or step % k != 0:
        return False
    for name, f in fast.items():
        s = slow.setdefault(name, f.copy())
        s += alpha * (f - s)
        f[...] = s
    return True


class Ranger:
    """RAdam plus Lookahead over the trainable parameters of a network."""

    def __init__(self, network, cfg, state=None):
        self.network = network
        self.cfg = cfg
        self.params = {name: p for name, p, _, trainable in network.named_parameters() if trainable}
        self.grads = {name: g for name, _, g, trainable in network.named_parameters() if trainable}
        self.state = state if state is not None else OptState.initial(self.params)
        for name, p in self.params.items():
            for slots in (self.state.m, self.state.v, self.state.slow):
                if name in slots and slots[name].shape != p.shape:
                    raise ValidationError(f'optimizer state for {name} does not match its parameter')

    def step(self, lr):
        radam_step(self.params, self.grads, self.state, lr, self.cfg.betas, self.cfg.eps)
        lookahead_sync(self.params, self.state.slow, self.cfg.lookahead_k, self.cfg.lookahead_alpha, self.state.step)


# =========== SCHEDULE ===========

def lr_schedule(epoch, cfg):
    """
    Constant lr_start for the warm epochs, then cosine annealing that reaches
    lr_end at the final epoch. Fractional epochs are allowed. When the final
    epoch is the first one after warm-up it runs at lr_end.
    """
    if not 0 <= epoch <= cfg.epochs - 1:
        raise ValidationError(f'epoch must lie in [0, {cfg.epochs - 1}], got {epoch}')
    if epoch < cfg.warm_epochs:
        return cfg.lr_start
    span = cfg.epochs - 1 - cfg.warm_epochs
    if span == 0:
        return cfg.lr_end
    progress = min((epoch - cfg.warm_epochs) / span, 1.0)
    return cfg.lr_end + 0.5 * (cfg.lr_start - cfg.lr_end) * (1.0 + math.cos(math.pi * progress))


# =========== EPOCH LOOP ===========

@dataclass
class TrainResult:
    network: object
    history: list
    state: OptState


def epoch_rng(seed, epoch):
    return np.random.default_rng([int(seed), int(epoch)])


def score_windows(network, data, labels, gamma):
    """Mean focal loss and EvalReport of a network over stacked windows."""
    losses = []
    preds = np.empty(labels.size, dtype=np.int64)
    for start in range(0, labels.size, EVAL_CHUNK):
        stop = start + EVAL_CHUNK
        probs = network.forward(data[start:stop])
        loss, _, _ = focal_loss(probs, labels[start:stop], gamma)
        losses.append(loss * probs.shape[0])
        preds[start:stop] = np.argmax(probs, axis=1)
    report = evaluate(preds, labels, network.config.num_classes)
    return float(sum(losses) / labels.size), report


def _warn_empty_classes(window_set):
    counts = window_set.class_counts
    missing = np.flatnonzero(counts == 0)
    if missing.size:
        logger.warning(
            'training set has no windows for %d classes: %s',
            missing.size, ', '.join(str(c) for c in missing),
        )
    return missing


def train_loop(network, train_set, val_set, cfg, augment_cfg=None, state=None,
               start_epoch=0, history=None, on_epoch_end=None):
    """
    Train for cfg.epochs epochs (from start_epoch when resuming).

    Each epoch augments the non-rest training windows afresh, shuffles, and
    steps Ranger once per batch; the last short batch is kept.

    Args:
        on_epoch_end: optional callable(epoch, network, state, history)

    Returns:
        TrainResult with the trained network, history rows and optimizer state
    """
    if not len(train_set):
        raise ValidationError('training set is empty')
    _warn_empty_classes(train_set)
    data, labels = train_set.stack()
    val_data, val_labels = val_set.stack() if val_set is not None and len(val_set) else (None, None)
    optimizer = Ranger(network, cfg, state)
    history = list(history or [])
    use_augment = cfg.augment and augment_cfg is not None

    for epoch in range(start_epoch, cfg.epochs):
        rng = epoch_rng(cfg.seed, epoch)
        lr = lr_schedule(epoch, cfg)
        epoch_data = augment_batch(data, labels, augment_cfg, rng) if use_augment else data
        order = rng.permutation(labels.size)

        total_loss = 0.0
        correct = 0
        for start in range(0, labels.size, cfg.batch_size):
            rows = order[start:start + cfg.batch_size]
            batch_labels = labels[rows]
            loss, _ = network.loss_and_grad(
                epoch_data[rows], batch_labels, cfg.focal_gamma, training=True, rng=rng,
            )
            optimizer.step(lr)
            total_loss += loss * rows.size
            correct += int(np.sum(np.argmax(network.probs, axis=1) == batch_labels))
            logger.debug('epoch %d batch %d loss %.6f', epoch, start // cfg.batch_size, loss)

        row = {
            'epoch': epoch,
            'lr': lr,
            'train_loss': total_loss / labels.size,
            'train_acc': correct / labels.size,
            'val_loss': float('nan'),
            'val_acc': float('nan'),
            'val_balacc': float('nan'),
            'val_mcc': float('nan'),
        }
        if val_data is not None:
            val_loss, report = score_windows(network, val_data, val_labels, cfg.focal_gamma)
            row.update(
                val_loss=val_loss,
                val_acc=report.accuracy,
                val_balacc=report.balanced_accuracy,
                val_mcc=report.mcc,
            )
        history.append(row)
        logger.info(
            'epoch %d/%d lr %.2e train_loss %.4f train_acc %.3f val_acc %.3f val_mcc %.3f',
            epoch + 1, cfg.epochs, lr, row['train_loss'], row['train_acc'], row['val_acc'], row['val_mcc'],
        )
        if on_epoch_end is not None:
            on_epoch_end(epoch, network, optimizer.state, history)

    return TrainResult(network=network, history=history, state=optimizer.state)
