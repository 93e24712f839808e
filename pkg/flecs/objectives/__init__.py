from .base import FULL_BATCH, MINIBATCH, FULL, BatchSpec, Shard, global_value_and_grad
from .logistic import LogisticShard, logistic_loss
from .quadratic import QuadraticShard
