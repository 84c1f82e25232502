// Stand-in for the Highcharts declaration file: option-bag factories used
// by the demo chart. Option objects come back as plain dynamic values.

declare var HighchartsOptions : HighchartsOptionsFactory;
declare var HighchartsChartOptions : HighchartsChartOptionsFactory;
declare var HighchartsTitleOptions : HighchartsTitleOptionsFactory;
declare var HighchartsSeriesOptions : HighchartsSeriesOptionsFactory;

interface HighchartsOptionsFactory {
    (): HighchartsSettings;
}

interface HighchartsSettings {
    chart: any;
    title: any;
    series: any[];
}

interface HighchartsChartOptionsFactory {
    (renderTo?: string): any;
}

interface HighchartsTitleOptionsFactory {
    (text?: string): any;
}

interface HighchartsSeriesOptionsFactory {
    (data?: any, name?: string): any;
}
