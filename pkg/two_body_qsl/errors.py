from typeguard import typechecked


@typechecked
class TwoBodyQslError(Exception):
    pass


@typechecked
class ConfigError(TwoBodyQslError):
    pass


@typechecked
class DimensionError(TwoBodyQslError):
    pass


@typechecked
class NonHermitianError(TwoBodyQslError):
    pass


@typechecked
class SymmetryError(TwoBodyQslError):
    pass


@typechecked
class ZeroBandwidthError(TwoBodyQslError):
    pass


@typechecked
class CombinationNotInCatalogError(TwoBodyQslError):
    pass


@typechecked
class InvalidArgumentError(TwoBodyQslError):
    pass
