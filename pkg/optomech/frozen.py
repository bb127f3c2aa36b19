"""
Classes and metaclasses for value objects which cannot be modified after
initialisation.
"""


class FrozenMeta(type):
    """
    Metaclass for frozen value objects.

    Intercepts instance creation via __call__ and sets the _initialised flag
    once __init__ has completed. Frozen uses the flag to refuse any further
    attribute assignment.
    """
    def __call__(cls, /, *args, **kwargs):
        instance = super().__call__(*args, **kwargs)
        instance.__dict__["_initialised"] = True
        return instance


class Frozen(metaclass=FrozenMeta):
    """
    Base class for immutable value objects.

    Attributes may be set freely inside __init__. Afterwards any assignment,
    whether to an existing or a new attribute, raises AttributeError. Use
    `replace()` on subclasses that provide it to obtain a modified copy.
    """
    def __setattr__(self, name, value):
        """
        Refuse attribute assignment after initialisation.

        Parameters
        ----------
        name: str
            The name of the attribute to set.
        value: any
            The value to assign to the attribute.

        Raises
        ------
        AttributeError
            If the instance has finished initialising.
        """
        if self.__dict__.get("_initialised", False):
            fields = ", ".join(
                key for key in self.__dict__ if not key.startswith("_"))
            raise AttributeError(
                f"Cannot set attribute '{name}' - {type(self).__name__} is "
                f"immutable after initialisation (fields: {fields}).")
        object.__setattr__(self, name, value)

    def __delattr__(self, name):
        raise AttributeError(
            f"Cannot delete attribute '{name}' - {type(self).__name__} is "
            "immutable.")

    def __repr__(self):
        fields = ", ".join(
            f"{key}={value!r}" for key, value in self.__dict__.items()
            if not key.startswith("_") and not hasattr(value, "shape"))
        return f"{type(self).__name__}({fields})"
