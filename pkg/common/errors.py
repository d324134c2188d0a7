"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""


class ModelDefinitionException(Exception):
    """ The request or the model is not valid. The CLI maps it to exit code 2. """

    def __init__(self, message):
        super().__init__(message)


class NumericFailureException(Exception):
    """ A numeric routine could not complete. The CLI maps it to exit code 3. """

    def __init__(self, message):
        super().__init__(message)
