"""
Copyright (c) Microsoft Corporation.
Licensed under the MIT license.
"""
from abc import abstractmethod, ABC
from .checkresults import CheckResults, ResidualResult
from .stringwriter import StringWriter


def get_check_results_view(check_results):
    return CheckResultsView(check_results)


def get_inspect_view(model, point, torsion, coefficients):
    return ModelInspectView(model, point, torsion, coefficients)


def get_trajectory_view(trajectory, file_name=None):
    return TrajectoryView(trajectory, file_name)


def print_results_view(results_view):
    if not isinstance(results_view, ResultsView):
        raise ValueError("Expected ResultsView")

    results_view.print()

    print("Total: {} \n".format(results_view.total))


class ResultsView(ABC):

    def print(self):
        print(self.get_view())

    @abstractmethod
    def get_view(self):
        pass

    @abstractmethod
    def total(self):
        pass


class CheckResultsView(ResultsView):
    def __init__(self, check_results):
        if not isinstance(check_results, CheckResults):
            raise ValueError("Expected CheckResults")
        self.model_name = check_results.model_name
        self.samples = check_results.samples
        self.residual_views = [ResidualView(result) for result in check_results.results]
        super().__init__()

    def get_view(self):
        sw = StringWriter()
        sw.write_line('Model: {} - Sample points: {}'.format(self.model_name, self.samples))
        sw.write_rule('=')

        if len(self.failing_checks) > 0:
            sw.write_line('FAILING CHECKS')
            sw.write_rule()
            for view in self.failing_checks:
                sw.write(view.get_view())
            sw.write_line()

        if len(self.passing_checks) > 0:
            sw.write_line('PASSING CHECKS')
            sw.write_rule()
            for view in self.passing_checks:
                sw.write(view.get_view())
            sw.write_line()

        return sw.to_string()

    @property
    def total(self):
        return len(self.residual_views)

    @property
    def passing_checks(self):
        return [view for view in self.residual_views if view.passed]

    @property
    def failing_checks(self):
        return [view for view in self.residual_views if not view.passed]


class ResidualView(ResultsView):
    def __init__(self, residual_result):
        if not isinstance(residual_result, ResidualResult):
            raise ValueError("Expected ResidualResult")

        self.check_name = residual_result.check_name
        self.passed = residual_result.passed
        self.value = residual_result.value
        self.tolerance = residual_result.tolerance
        self.exception = residual_result.exception
        super().__init__()

    def get_view(self):
        sw = StringWriter()
        sw.write_line('{:<45} {:.3e} (tol {:.1e})'.format(
            self.check_name, self.value, self.tolerance))
        if self.exception is not None:
            sw.write_line('    ' + self.exception.__class__.__name__ + ": " + str(self.exception))
        return sw.to_string()

    @property
    def total(self):
        return 1


class ModelInspectView(ResultsView):
    def __init__(self, model, point, torsion, coefficients):
        self.name = model.name
        self.grading = model.grading
        self.gram = model.gram
        self.null_pair = model.null_pair
        self.point = point
        self.torsion = torsion
        self.coefficients = coefficients
        super().__init__()

    def get_view(self):
        sw = StringWriter()
        sw.write_line('Model: {}'.format(self.name))
        sw.write_rule('=')
        sw.write_line('Blocks: {}'.format(', '.join(
            '{}:{} (index {})'.format(label.name, dimension, label.index)
            for label, dimension in self.grading.blocks)))
        sw.write_line('Frame slots: {}'.format(
            ' '.join(label.name for label in self.grading.frame_slots)))
        if self.null_pair is not None:
            n, nstar = self.null_pair.slots
            sw.write_line('Null pair: n = E{}, n* = E{}'.format(n + 1, nstar + 1))
        sw.write_line('Gram:')
        sw.write_matrix(self.gram)
        sw.write_line('Point: {}'.format([float(value) for value in self.point]))
        sw.write_rule()
        sw.write_line('Torsion T(E_a, E_b) components:')
        sw.write_entries('T', self.torsion)
        sw.write_line('Connection coefficients nabla_{E_a} E_b components:')
        sw.write_entries('Gamma', self.coefficients)
        return sw.to_string()

    @property
    def total(self):
        return self.grading.dimension


class TrajectoryView(ResultsView):
    def __init__(self, trajectory, file_name=None):
        self.kind = trajectory.kind
        self.steps = trajectory.steps
        self.start = trajectory.points[0]
        self.endpoint = trajectory.endpoint
        self.multipliers = None if trajectory.multipliers is None else trajectory.multipliers[-1]
        self.file_name = file_name
        super().__init__()

    def get_view(self):
        sw = StringWriter()
        sw.write_line('Trajectory ({}) with {} steps'.format(self.kind, self.steps))
        sw.write_line('Start: {}'.format([float(value) for value in self.start]))
        sw.write_line('End:   {}'.format([float(value) for value in self.endpoint]))
        if self.multipliers is not None:
            sw.write_line('Final multipliers: {}'.format(
                [float(value) for value in self.multipliers]))
        if self.file_name is not None:
            sw.write_line('Written to {}'.format(self.file_name))
        return sw.to_string()

    @property
    def total(self):
        return self.steps + 1
