package org.example.stats;

public class RegressionTest {
    private final double slope;
    private final double intercept;

    public RegressionTest(double slope, double intercept) {
        this.slope = slope;
        this.intercept = intercept;
    }

    public double predict(double x) {
        return slope * x + intercept;
    }

    public double slope() {
        return slope;
    }
}
