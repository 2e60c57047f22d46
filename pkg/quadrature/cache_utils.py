"""
Caching utilities for expensive, deterministic constructions.

Provides a decorator for caching function results in the Django cache with
stable key generation, so a sphere grid or quadrature rule is built once
per (arguments) and reused by every evaluator in the process.

Usage:
    from quadrature.cache_utils import cached

    @cached(key_prefix='sphere_grid')
    def build_grid(n, degree):
        ...
"""

import hashlib
import json
import logging
from functools import wraps

import numpy as np
from django.conf import settings
from django.core.cache import cache

logger = logging.getLogger(__name__)


def default_timeout():
    return getattr(settings, 'GBC_GRID_CACHE_TIMEOUT', 3600)


def cached(ttl_seconds=None, key_prefix=''):
    """
    Decorator for caching function results with stable key generation.

    Args:
        ttl_seconds: Time to live in seconds (defaults to GBC_GRID_CACHE_TIMEOUT)
        key_prefix: Prefix for cache key namespace (e.g., 'sphere_grid')

    Returns:
        Decorated function that caches results

    Note:
        - Cache keys are MD5 hashes of function name + normalized args
        - If key generation fails, function executes without caching
        - Hits and misses are logged at DEBUG level
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            try:
                cache_key = _generate_cache_key(func, args, kwargs, key_prefix)
            except (TypeError, ValueError) as e:
                logger.warning(
                    f"Cache key generation failed for {func.__name__}: {e}. "
                    f"Executing without cache."
                )
                return func(*args, **kwargs)

            cached_value = cache.get(cache_key)
            if cached_value is not None:
                logger.debug(f"Cache HIT: {func.__name__} (key: {cache_key[:8]}...)")
                return cached_value

            logger.debug(f"Cache MISS: {func.__name__} (key: {cache_key[:8]}...)")
            result = func(*args, **kwargs)

            ttl = default_timeout() if ttl_seconds is None else ttl_seconds
            try:
                cache.set(cache_key, result, ttl)
            except Exception as e:
                logger.warning(
                    f"Failed to cache result for {func.__name__}: {e}. "
                    f"Result returned but not cached."
                )

            return result

        wrapper.cache_info = lambda: {
            'function': func.__name__,
            'ttl': ttl_seconds,
            'prefix': key_prefix,
        }

        return wrapper
    return decorator


def _plain(value):
    """numpy scalars to Python numbers; containers recursively."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    raise TypeError(f"unhashable cache argument of type {type(value).__name__}")


def _normalize(arg):
    arg = _plain(arg)
    if isinstance(arg, (dict, list)):
        return json.dumps(arg, sort_keys=True)
    return repr(arg)


def _generate_cache_key(func, args, kwargs, key_prefix):
    """
    Generate a stable cache key from function name and arguments.

    Returns:
        32-character MD5 hash string

    Raises:
        TypeError: If arguments cannot be serialized
    """
    normalized_args = [_normalize(arg) for arg in args]
    if kwargs:
        normalized_args.append(json.dumps({k: _plain(v) for k, v in kwargs.items()}, sort_keys=True))

    key_parts = [key_prefix, func.__name__] + normalized_args
    key_str = ':'.join(filter(None, key_parts))

    return hashlib.md5(key_str.encode('utf-8')).hexdigest()
